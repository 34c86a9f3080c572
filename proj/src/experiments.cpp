#include "experiments.hpp"

#include <algorithm>
#include <cmath>

#include "coupling.hpp"
#include "csv.hpp"
#include "errors.hpp"
#include "model_syntax.hpp"
#include "parallel.hpp"
#include "svg.hpp"

namespace levycouple {

namespace {

// Stream ids under the root seed.
enum : std::uint64_t {
  kEndpointStream = 1,
  kReplicationStream = 2,
  kPathStream = 3,
  kLevelStream = 4,
  kComplexityStream = 5,
};

std::string join_path(const std::string& dir, const std::string& file) { return dir + "/" + file; }

std::string ks_text(const std::vector<std::size_t>& ks) {
  std::string s;
  for (std::size_t i = 0; i < ks.size(); ++i) s += (i ? ":" : "") + std::to_string(ks[i]);
  return s;
}

ExperimentOutput run_couple(const ExperimentConfig& cfg, const RngStream& root) {
  ExperimentOutput out;
  const LevyModel model(parse_model(effective_model(cfg)));
  const auto cdf = endpoint_cdf(model, cfg.endpoint_samples, root.split(kEndpointStream));
  RngStream rng = root.split(kPathStream);
  const auto ks = effective_ks(cfg);
  const CoupledPaths p = hierarchical_coupling(model, ks, cfg.q, *cdf, rng);
  const std::string file = join_path(cfg.out, "couple.csv");
  CsvWriter csv(file, config_echo(cfg), {"t[time]", "x[unit-variance]", "w[unit-variance]", "w_prime[unit-variance]"});
  for (std::size_t j = 0; j < p.x.values.size(); ++j)
    csv.row({cell(p.x.time(j)), cell(p.x.values[j]), cell(p.w.values[j]), cell(p.w_prime.values[j])});
  out.files.push_back(file);
  out.summary.push_back("sup|X-W| = " + format_number(sup_distance(p)) + ", W(1) - X(1) = " +
                        format_number(p.w.endpoint() - p.x.endpoint()));
  return out;
}

ExperimentOutput run_msmd(const ExperimentConfig& cfg, const RngStream& root) {
  ExperimentOutput out;
  const LevyModel model(parse_model(effective_model(cfg)));
  CouplingConfig cc;
  cc.ks = effective_ks(cfg);
  cc.cells = dyadic_cells(cfg.q);
  cc.endpoint = endpoint_cdf(model, cfg.endpoint_samples, root.split(kEndpointStream));
  const MsmdResult r = msmd_estimate(model, cc, cfg.reps, root.split(kReplicationStream));
  const std::string file = join_path(cfg.out, "msmd.csv");
  CsvWriter csv(file, config_echo(cfg),
                {"model", "ks", "q", "reps", "rms_sup_distance[unit]", "rms_se[unit]",
                 "mean_sq_sup[unit^2]", "mean_sq_se[unit^2]", "endpoint_rmse[unit]", "endpoint_rmse_se[unit]"});
  csv.row({"\"" + format_model(model.spec()) + "\"", ks_text(cc.ks), cell(cfg.q), cell(cfg.reps),
           cell(r.rms.mean), cell(r.rms.std_error), cell(r.mean_sq_sup.mean), cell(r.mean_sq_sup.std_error),
           cell(r.endpoint_rmse.mean), cell(r.endpoint_rmse.std_error)});
  out.files.push_back(file);
  out.summary.push_back("RMS max distance = " + format_number(r.rms.mean) + " +- " +
                        format_number(r.rms.std_error) + ", endpoint RMSE = " +
                        format_number(r.endpoint_rmse.mean));
  return out;
}

ExperimentOutput run_sweep_k(const ExperimentConfig& cfg, const RngStream& root) {
  ExperimentOutput out;
  std::vector<std::pair<double, double>> combos;
  if (cfg.eps1 || cfg.eps2) {
    (void)effective_model(cfg);
    combos.emplace_back(*cfg.eps1, *cfg.eps2);
  } else {
    combos = {{0.1, 0.03}, {0.1, 0.01}, {1.0, 0.03}, {1.0, 0.01}};
  }
  const std::string file = join_path(cfg.out, "sweep_k.csv");
  CsvWriter csv(file, config_echo(cfg),
                {"eps1[jump size]", "eps2[jump size]", "log2_k", "k[cells]", "rms_sup_distance[unit]",
                 "rms_se[unit]"});
  std::vector<Series> series;
  for (std::size_t c = 0; c < combos.size(); ++c) {
    const auto [e1, e2] = combos[c];
    const LevyModel model(make_spec(TruncatedStable{1.5, 0.4, 0.6, e2, e1}));
    const RngStream base = root.split(100 + c);
    const auto cdf = endpoint_cdf(model, cfg.endpoint_samples, base.split(kEndpointStream));
    const auto pts = k_sweep(model, cdf, cfg.q, powers_of_two(cfg.q), 1, cfg.reps, base.split(kReplicationStream));
    Series s{"eps1=" + format_number(e1) + " eps2=" + format_number(e2), {}, {}};
    std::size_t best = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double lk = std::log2(static_cast<double>(pts[i].k1));
      csv.row({cell(e1), cell(e2), cell(lk), cell(pts[i].k1), cell(pts[i].result.rms.mean),
               cell(pts[i].result.rms.std_error)});
      s.x.push_back(lk);
      s.y.push_back(pts[i].result.rms.mean);
      if (pts[i].result.rms.mean < pts[best].result.rms.mean) best = i;
    }
    series.push_back(std::move(s));
    out.summary.push_back("eps1=" + format_number(e1) + " eps2=" + format_number(e2) + ": best k = " +
                          std::to_string(pts[best].k1) + ", RMS = " + format_number(pts[best].result.rms.mean));
  }
  out.files.push_back(file);
  const std::string svg = join_path(cfg.out, "sweep_k.svg");
  write_line_chart(svg, "RMS maximal distance against k", "log2 k", "RMS sup |X - W|", series);
  out.files.push_back(svg);
  return out;
}

ExperimentOutput run_two_level(const ExperimentConfig& cfg, const RngStream& root) {
  ExperimentOutput out;
  const LevyModel model(parse_model(effective_model(cfg)));
  const auto cdf = endpoint_cdf(model, cfg.endpoint_samples, root.split(kEndpointStream));
  const std::string file = join_path(cfg.out, "two_level.csv");
  CsvWriter csv(file, config_echo(cfg),
                {"k2[cells]", "log2_k1", "k1[cells]", "rms_sup_distance[unit]", "rms_se[unit]"});
  std::vector<Series> series;
  for (std::size_t k2 : {std::size_t{1}, std::size_t{4}, std::size_t{16}}) {
    const int max_exp = cfg.q - static_cast<int>(std::log2(static_cast<double>(k2)));
    const auto pts = k_sweep(model, cdf, cfg.q, powers_of_two(max_exp), k2, cfg.reps,
                             root.split(kReplicationStream));
    Series s{"k2=" + std::to_string(k2), {}, {}};
    std::size_t best = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double lk = std::log2(static_cast<double>(pts[i].k1));
      csv.row({cell(k2), cell(lk), cell(pts[i].k1), cell(pts[i].result.rms.mean), cell(pts[i].result.rms.std_error)});
      s.x.push_back(lk);
      s.y.push_back(pts[i].result.rms.mean);
      if (pts[i].result.rms.mean < pts[best].result.rms.mean) best = i;
    }
    series.push_back(std::move(s));
    out.summary.push_back("k2=" + std::to_string(k2) + ": best k1 = " + std::to_string(pts[best].k1) +
                          ", RMS = " + format_number(pts[best].result.rms.mean));
  }
  out.files.push_back(file);
  const std::string svg = join_path(cfg.out, "two_level.svg");
  write_line_chart(svg, "Second-level reordering", "log2 k1", "RMS sup |X - W|", series);
  out.files.push_back(svg);
  return out;
}

ExperimentOutput run_showcase(const ExperimentConfig& cfg, const RngStream& root) {
  ExperimentOutput out;
  const LevyModel model(parse_model(effective_model(cfg)));
  CouplingConfig cc;
  cc.ks = effective_ks(cfg);
  cc.cells = dyadic_cells(cfg.q);
  cc.endpoint = endpoint_cdf(model, cfg.endpoint_samples, root.split(kEndpointStream));
  const RngStream reps = root.split(kReplicationStream);
  const MsmdResult r = msmd_estimate(model, cc, cfg.reps, reps);

  const std::string sups_file = join_path(cfg.out, "showcase_distances.csv");
  {
    CsvWriter csv(sups_file, config_echo(cfg), {"replication", "sup_distance[unit]"});
    for (std::size_t i = 0; i < r.sups.size(); ++i) csv.row({cell(i), cell(r.sups[i])});
  }
  const std::string hist_file = join_path(cfg.out, "showcase_histogram.csv");
  {
    const double hi = *std::max_element(r.sups.begin(), r.sups.end());
    const std::size_t bins = 30;
    std::vector<std::size_t> counts(bins, 0);
    for (double s : r.sups) counts[std::min(bins - 1, static_cast<std::size_t>(s / hi * bins))]++;
    CsvWriter csv(hist_file, config_echo(cfg), {"bin_lo[unit]", "bin_hi[unit]", "count"});
    for (std::size_t b = 0; b < bins; ++b)
      csv.row({cell(hi * b / bins), cell(hi * (b + 1) / bins), cell(counts[b])});
  }

  // Replications whose distance sits at the 0.05, 0.50 and 0.95 quantiles.
  std::vector<std::size_t> order(r.sups.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r.sups[a] < r.sups[b]; });
  const double levels[] = {0.05, 0.50, 0.95};
  std::vector<CoupledPaths> picks;
  for (double u : levels) {
    auto rank = static_cast<std::size_t>(std::ceil(u * static_cast<double>(order.size())));
    rank = std::clamp<std::size_t>(rank, 1, order.size());
    RngStream s = reps.split(order[rank - 1]);
    picks.push_back(hierarchical_coupling_on_grid(model, cc.ks, cc.cells, *cc.endpoint, s));
  }
  const std::string paths_file = join_path(cfg.out, "showcase_paths.csv");
  {
    CsvWriter csv(paths_file, config_echo(cfg),
                  {"t[time]", "x_q05", "w_q05", "x_q50", "w_q50", "x_q95", "w_q95"});
    for (std::size_t j = 0; j <= cc.cells; ++j)
      csv.row({cell(picks[0].x.time(j)), cell(picks[0].x.values[j]), cell(picks[0].w.values[j]),
               cell(picks[1].x.values[j]), cell(picks[1].w.values[j]), cell(picks[2].x.values[j]),
               cell(picks[2].w.values[j])});
  }
  const std::string summary_file = join_path(cfg.out, "showcase_summary.csv");
  {
    CsvWriter csv(summary_file, config_echo(cfg),
                  {"rms_sup_distance[unit]", "rms_se[unit]", "endpoint_rmse[unit]", "endpoint_rmse_se[unit]"});
    csv.row({cell(r.rms.mean), cell(r.rms.std_error), cell(r.endpoint_rmse.mean), cell(r.endpoint_rmse.std_error)});
  }
  out.files = {sups_file, hist_file, paths_file, summary_file};
  out.summary.push_back("RMS max distance = " + format_number(r.rms.mean) + ", endpoint RMSE = " +
                        format_number(r.endpoint_rmse.mean));
  return out;
}

ExperimentOutput run_limit_regime(const ExperimentConfig& cfg, const RngStream& root) {
  ExperimentOutput out;
  const std::string file = join_path(cfg.out, "limit_regime.csv");
  const std::string detail = join_path(cfg.out, "limit_regime_sweep.csv");
  CsvWriter csv(file, config_echo(cfg),
                {"n", "eps1[jump size]", "eps2[jump size]", "mu4", "d_star[unit]", "d_star_se[unit]",
                 "k_star[cells]", "log_d_star", "theory_log_d", "log_k_star", "theory_log_k"});
  CsvWriter det(detail, config_echo(cfg), {"n", "k[cells]", "rms_sup_distance[unit]", "rms_se[unit]"});
  Series sd{"log d*", {}, {}}, td{"theory", {}, {}}, sk{"log k*", {}, {}}, tk{"theory k", {}, {}};
  for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
    const LimitRow row = limit_regime_level(n, cfg.q, cfg.reps, cfg.endpoint_samples, root.split(200 + n));
    csv.row({cell(n), cell(std::ldexp(1.0, -n)), cell(std::ldexp(1.0, -n - 1)), cell(row.mu4), cell(row.d_star),
             cell(row.d_star_se), cell(row.k_star), cell(std::log(row.d_star)), cell(row.theory_log_d),
             cell(std::log(static_cast<double>(row.k_star))), cell(row.theory_log_k)});
    for (const auto& p : row.sweep)
      det.row({cell(n), cell(p.k1), cell(p.result.rms.mean), cell(p.result.rms.std_error)});
    sd.x.push_back(n), sd.y.push_back(std::log(row.d_star));
    td.x.push_back(n), td.y.push_back(row.theory_log_d);
    sk.x.push_back(n), sk.y.push_back(std::log(static_cast<double>(row.k_star)));
    tk.x.push_back(n), tk.y.push_back(row.theory_log_k);
    out.summary.push_back("n=" + std::to_string(n) + ": d* = " + format_number(row.d_star) +
                          ", k* = " + std::to_string(row.k_star));
  }
  const std::string svg = join_path(cfg.out, "limit_regime.svg");
  write_line_chart(svg, "Optimal distance and k against n", "n", "log value", {sd, td, sk, tk});
  out.files = {file, detail, svg};
  return out;
}

ExperimentOutput run_mlmc_bench(const ExperimentConfig& cfg, const RngStream& root) {
  ExperimentOutput out;
  const SpecPtr base = parse_model(cfg.base);
  const Functional g = *parse_functional(cfg.functional);
  const auto rows = level_table(*base, g, cfg.level_min, cfg.level_max, cfg.level_samples, cfg.p,
                                cfg.endpoint_samples, root.split(kLevelStream));
  const std::string file = join_path(cfg.out, "mlmc_levels.csv");
  {
    CsvWriter csv(file, config_echo(cfg),
                  {"mode", "level", "eps[jump size]", "k_prime[cells]", "m_n[cells]", "mean_diff",
                   "var_diff", "cost[work units]", "n_samples"});
    for (const auto& r : rows)
      csv.row({mode_name(r.mode), cell(r.spec.n), cell(r.spec.eps_n), cell(r.spec.k_prime), cell(r.spec.m_n),
               cell(r.stats.mean_diff), cell(r.stats.var_diff), cell(r.stats.cost), cell(r.stats.n_samples)});
  }
  out.files.push_back(file);

  const std::string cfile = join_path(cfg.out, "mlmc_complexity.csv");
  CsvWriter csv(cfile, config_echo(cfg),
                {"mode", "delta", "estimate", "std_error", "bias_estimate", "total_cost[work units]", "levels",
                 "converged"});
  MlmcOptions opt;
  opt.p = cfg.p;
  opt.endpoint_samples = cfg.endpoint_samples;
  opt.max_level = cfg.level_max + 1;
  for (double delta : cfg.deltas) {
    for (CouplingMode mode : {CouplingMode::independent, CouplingMode::reordering}) {
      const MlmcResult r = mlmc_run(*base, g, mode, delta, root.split(kComplexityStream), opt);
      csv.row({mode_name(mode), cell(delta), cell(r.estimate), cell(std::sqrt(r.estimator_variance)),
               cell(r.bias_estimate), cell(r.total_cost), cell(r.levels.size()), r.converged ? "1" : "0"});
      out.summary.push_back(std::string(mode_name(mode)) + " delta=" + format_number(delta) +
                            ": estimate " + format_number(r.estimate) + ", cost " + format_number(r.total_cost));
    }
  }
  out.files.push_back(cfile);
  return out;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"couple",    "msmd",         "sweep-k",   "two-level",
                                              "showcase",  "limit-regime", "mlmc-bench"};
  return names;
}

ExperimentOutput run_experiment(const std::string& name, const ExperimentConfig& cfg) {
  validate(cfg);
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw ConfigError("unknown experiment '" + name + "'");
  set_thread_count(cfg.threads);
  ensure_directory(cfg.out);
  const RngStream root(*cfg.seed);
  if (name == "couple") return run_couple(cfg, root);
  if (name == "msmd") return run_msmd(cfg, root);
  if (name == "sweep-k") return run_sweep_k(cfg, root);
  if (name == "two-level") return run_two_level(cfg, root);
  if (name == "showcase") return run_showcase(cfg, root);
  if (name == "limit-regime") return run_limit_regime(cfg, root);
  return run_mlmc_bench(cfg, root);
}

std::vector<std::size_t> powers_of_two(int max_exp) {
  std::vector<std::size_t> out;
  for (int i = 0; i <= max_exp; ++i) out.push_back(std::size_t{1} << i);
  return out;
}

std::vector<KSweepPoint> k_sweep(const LevyModel& model, CdfPtr endpoint, int q,
                                 const std::vector<std::size_t>& k1_values, std::size_t k2,
                                 std::size_t reps, const RngStream& rng) {
  std::vector<KSweepPoint> out;
  CouplingConfig cc;
  cc.cells = dyadic_cells(q);
  cc.endpoint = std::move(endpoint);
  for (std::size_t k1 : k1_values) {
    cc.ks = k2 > 1 ? std::vector<std::size_t>{k1, k2} : std::vector<std::size_t>{k1};
    KSweepPoint p;
    p.k1 = k1;
    p.k2 = k2;
    p.result = msmd_estimate(model, cc, reps, rng);
    p.result.sups.clear();
    p.result.endpoint_diffs.clear();
    out.push_back(std::move(p));
  }
  return out;
}

LimitRow limit_regime_level(int n, int q, std::size_t reps, std::size_t endpoint_samples,
                            const RngStream& rng) {
  LimitRow row;
  row.n = n;
  const LevyModel model(parse_model("annulus(" + std::to_string(n) + ")"));
  row.mu4 = model.moments().mu4;
  const double lm = std::abs(std::log(row.mu4));
  row.theory_log_d = std::log(row.mu4 * lm) / 4.0;
  row.theory_log_k = std::log(lm / row.mu4) / 2.0;
  const auto cdf = endpoint_cdf(model, endpoint_samples, rng.split(kEndpointStream));
  row.sweep = k_sweep(model, cdf, q, powers_of_two(q), 1, reps, rng.split(kReplicationStream));
  std::size_t best = 0;
  for (std::size_t i = 0; i < row.sweep.size(); ++i)
    if (row.sweep[i].result.rms.mean < row.sweep[best].result.rms.mean) best = i;
  row.d_star = row.sweep[best].result.rms.mean;
  row.d_star_se = row.sweep[best].result.rms.std_error;
  row.k_star = row.sweep[best].k1;
  return row;
}

double fitted_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  require(xs.size() == ys.size() && xs.size() >= 2, "slope needs at least two points");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) sx += xs[i], sy += ys[i];
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

std::vector<LevelRow> level_table(const LevyModelSpec& base, Functional g, int n_min, int n_max,
                                  std::size_t samples, double p, std::size_t endpoint_samples,
                                  const RngStream& rng) {
  std::vector<LevelRow> rows;
  for (CouplingMode mode : {CouplingMode::independent, CouplingMode::reordering}) {
    for (int n = n_min; n <= n_max; ++n) {
      const LevelDecomposition d = decompose_level(base, n, p);
      const RngStream level_rng = rng.split(static_cast<std::uint64_t>(n));
      CdfPtr cache;
      if (mode == CouplingMode::reordering && !d.spec.degenerate)
        cache = level_endpoint_cache(d, endpoint_samples, level_rng.split(1'000'000));
      LevelRow row;
      row.mode = mode;
      row.spec = d.spec;
      row.stats = estimate_level_stats(d, mode, g, samples, level_rng, cache.get());
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace levycouple
