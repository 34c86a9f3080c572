// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "coupling.hpp"
#include "distribution.hpp"
#include "experiments.hpp"
#include "metrics.hpp"
#include "mlmc.hpp"
#include "model_syntax.hpp"
#include "oracles.hpp"

using namespace levycouple;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20240601;
int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double slope(const std::vector<double>& y) {
  std::vector<double> x(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
  return fitted_slope(x, y);
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

// Criteria 1 to 3 share one seed batch.
void headline() {
  Timer t;
  const LevyModel model(parse_model("exp-stable(0.1,0.03)"));
  const RngStream root(kSeed);
  CouplingConfig cfg;
  cfg.cells = dyadic_cells(12);
  cfg.endpoint = endpoint_cdf(model, 30000, root.split(1));
  cfg.ks = {128};
  const MsmdResult one = msmd_estimate(model, cfg, 1000, root.split(2));
  cfg.ks = {64, 16};
  const MsmdResult two = msmd_estimate(model, cfg, 1000, root.split(2));

  const double r1 = one.rms.mean, r2 = two.rms.mean;
  report(1, r1 >= 0.36 && r1 <= 0.44,
         fmt("RMS sup distance k=128: %.4f +- %.4f (band [0.36, 0.44])", r1, one.rms.std_error));
  report(2, r2 >= 0.30 && r2 <= 0.38 && r2 <= 0.9 * r1,
         fmt("RMS sup distance ks=[64,16]: %.4f +- %.4f, %.1f%% below k=128 (band [0.30, 0.38], >= 10%%)", r2,
             two.rms.std_error, 100.0 * (1.0 - r2 / r1)));
  const double e = one.endpoint_rmse.mean;
  report(3, e >= 0.003 && e <= 0.02, fmt("endpoint RMSE %.5f (band [0.003, 0.02]); %.0f s", e, t.seconds()));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream s(line);
  std::string c;
  while (std::getline(s, c, ',')) out.push_back(c);
  return out;
}

void u_shape() {
  Timer t;
  ExperimentConfig cfg;
  cfg.seed = kSeed;
  cfg.eps1 = 0.1;
  cfg.eps2 = 0.03;
  const fs::path dir = fs::temp_directory_path() / "levycouple_acceptance_sweep";
  fs::remove_all(dir);
  cfg.out = dir.string();
  run_experiment("sweep-k", cfg);

  std::ifstream f(dir / "sweep_k.csv");
  std::string line;
  std::vector<std::pair<std::size_t, double>> rows;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("eps1", 0) == 0) continue;
    const auto c = split_csv(line);
    rows.emplace_back(std::stoul(c[3]), std::stod(c[4]));
  }
  fs::remove_all(dir);
  if (rows.empty()) {
    report(4, false, "sweep-k wrote no rows");
    return;
  }
  auto best = std::min_element(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.second < b.second; });
  const double at1 = rows.front().second, at_max = rows.back().second;
  const bool ok = rows.front().first == 1 && rows.back().first == 4096 && at1 > best->second &&
                  at_max > best->second && best->first >= 32 && best->first <= 256;
  report(4, ok,
         fmt("k_opt = %.0f with RMS %.4f; RMS(k=1) = %.4f, RMS(k=4096) = %.4f", static_cast<double>(best->first),
             best->second, at1, at_max) +
             fmt("; %.0f s", t.seconds()));
}

void ordering() {
  Timer t;
  const char* models[] = {"exp-stable(0.1,0.03)", "fig1-gamma", "cpp-atoms(3)"};
  const std::size_t k = 64, cells = dyadic_cells(12), runs = 1000;
  std::size_t failed = 0, total = 0;
  for (std::size_t mi = 0; mi < 3; ++mi) {
    const LevyModel m(parse_model(models[mi]));
    const RngStream root = RngStream(kSeed).split(300 + mi);
    const auto fx = endpoint_cdf(m, 30000, root.split(0));
    const InterpolatedCdf fk(sample_marginal(m, 1.0 / k, 30000, root.split(1)));
    const RngStream reps = root.split(2);
    for (std::size_t r = 0; r < runs; ++r) {
      RngStream s = reps.split(r);
      const TrivariatePaths tp = comonotone_increment_coupling(m, k, cells, *fx, fk, s);
      if (!ordering_diagnostics(tp).pass) ++failed;
      ++total;
    }
  }
  report(5, failed == 0,
         fmt("%.0f trivariate runs over 3 models, %.0f with differing rank vectors; %.0f s", double(total),
             double(failed), t.seconds()));
}

void permutation_oracle() {
  RngStream r = RngStream(kSeed).split(400);
  std::size_t mismatches = 0;
  const std::size_t trials = 10000;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t k = 1 + trial % 6;
    std::vector<double> dx(k), u(k), dw(k);
    const bool coarse = trial % 2 == 0;
    for (std::size_t i = 0; i < k; ++i) {
      dx[i] = coarse ? std::floor(4.0 * r.uniform()) : r.normal();
      u[i] = r.uniform();
      dw[i] = r.normal();
    }
    const auto found = oracle::admissible_permutations(dx, u, dw);
    if (found.size() != 1 || rank_permutation(dx, u, dw).pi != found.front()) ++mismatches;
  }
  report(6, mismatches == 0, fmt("%.0f random instances with k <= 6, %.0f mismatches", double(trials), double(mismatches)));
}

void brownian_law() {
  Timer t;
  const LevyModel m(parse_model("exp-stable(0.1,0.03)"));
  const RngStream root = RngStream(kSeed).split(500);
  const auto fx = endpoint_cdf(m, 30000, root.split(0));
  const std::size_t runs = 2000, cells = dyadic_cells(12);
  std::vector<double> half(runs), one(runs), second(runs);
  const RngStream reps = root.split(1);
  for (std::size_t i = 0; i < runs; ++i) {
    RngStream s = reps.split(i);
    const CoupledPaths c = reorder_coupling(m, 128, 12, *fx, s);
    half[i] = c.w.values[cells / 2];
    one[i] = c.w.values[cells];
    second[i] = one[i] - half[i];
  }
  const double p_half = oracle::ks_one_sample(half, [](double x) { return oracle::phi(x / std::sqrt(0.5)); }).p_value;
  const double p_one = oracle::ks_one_sample(one, [](double x) { return oracle::phi(x); }).p_value;
  const double rho = oracle::correlation(half, second);
  const bool ok = p_half > 0.01 && p_one > 0.01 && std::abs(rho) < 4.0 / std::sqrt(double(runs));
  report(7, ok,
         fmt("KS p-values W(1/2): %.3f, W(1): %.3f; corr(W(1/2), W(1)-W(1/2)) = %.4f; %.0f s", p_half, p_one, rho,
             t.seconds()));
}

void wasserstein_oracle() {
  RngStream r = RngStream(kSeed).split(600);
  double worst = 0.0;
  std::size_t fixtures = 0;
  for (std::size_t n = 1; n <= 6; ++n)
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> a(n), b(n);
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = trial % 3 == 0 ? std::floor(3.0 * r.uniform()) : r.normal();
        b[i] = 3.0 * r.uniform() - 1.0;
      }
      worst = std::max(worst, std::abs(wasserstein2_empirical(a, b) - oracle::min_assignment_rms(a, b)));
      ++fixtures;
    }
  report(8, worst <= 1e-12, fmt("%.0f fixtures with n <= 6, max deviation %.3g", double(fixtures), worst));
}

void bridge_band() {
  Timer t;
  const std::size_t k = 10000, reps = 200;
  const RngStream root = RngStream(kSeed).split(700);
  double acc = 0.0;
  std::vector<double> z(k), zp(k);
  for (std::size_t r = 0; r < reps; ++r) {
    RngStream s = root.split(r);
    for (auto& v : z) v = s.normal();
    for (auto& v : zp) v = s.normal();
    std::sort(z.begin(), z.end());
    std::sort(zp.begin(), zp.end());
    const double mz = oracle::mean(z), mzp = oracle::mean(zp);
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double d = (z[i] - mz) - (zp[i] - mzp);
      sum += d * d;
    }
    acc += sum;
  }
  const double stat = acc / reps / std::log(std::log(double(k)));
  report(9, stat >= 1.4 && stat <= 3.0, fmt("normalised bridge distance at k = 10^4: %.4f (band [1.4, 3.0]); %.0f s", stat, t.seconds()));
}

void mlmc_separation() {
  Timer t;
  const SpecPtr base = parse_model("stable-base");
  const auto rows = level_table(*base, Functional::supremum, 3, 6, 4000, 1.5, 30000, RngStream(kSeed).split(800));
  std::vector<double> lv_ind, lv_reo, se_ind, se_reo;
  for (const auto& r : rows) {
    const double se = oracle::variance_se(r.stats.diffs);
    if (r.mode == CouplingMode::independent) {
      lv_ind.push_back(r.stats.var_diff);
      se_ind.push_back(se);
    } else {
      lv_reo.push_back(r.stats.var_diff);
      se_reo.push_back(se);
    }
  }
  bool separated = lv_ind.size() == 4 && lv_reo.size() == 4;
  std::string per_level;
  for (std::size_t i = 0; i < std::min(lv_ind.size(), lv_reo.size()); ++i) {
    const double gap = lv_ind[i] - lv_reo[i];
    separated = separated && gap > 3.0 * std::hypot(se_ind[i], se_reo[i]);
    per_level += fmt(" n=%.0f: %.3g vs %.3g (se %.2g);", 3.0 + i, lv_reo[i], lv_ind[i], std::hypot(se_ind[i], se_reo[i]));
  }
  std::vector<double> l2i, l2r;
  for (double v : lv_ind) l2i.push_back(std::log2(v));
  for (double v : lv_reo) l2r.push_back(std::log2(v));
  const double si = slope(l2i), sr = slope(l2r);
  const bool ok = separated && std::abs(sr + 1.25) <= 0.35 && std::abs(si + 0.5) <= 0.35;
  report(10, ok,
         "variances (reordering vs independent)" + per_level +
             fmt(" log2 slopes %.3f (target -1.25) and %.3f (target -0.5); %.0f s", sr, si, t.seconds()));
}

void limit_regime() {
  Timer t;
  std::vector<double> ld, td, lk, tk;
  const RngStream root = RngStream(kSeed).split(900);
  std::string rows;
  for (int n = 3; n <= 8; ++n) {
    const LimitRow r = limit_regime_level(n, 12, 1000, 30000, root.split(n));
    ld.push_back(std::log(r.d_star));
    td.push_back(r.theory_log_d);
    lk.push_back(std::log(static_cast<double>(r.k_star)));
    tk.push_back(r.theory_log_k);
    rows += fmt(" n=%.0f: d*=%.4f k*=%.0f;", n, r.d_star, static_cast<double>(r.k_star));
  }
  const double rd = slope(ld) / slope(td), rk = slope(lk) / slope(tk);
  const bool ok = std::abs(rd - 1.0) <= 0.2 && std::abs(rk - 1.0) <= 0.2;
  report(11, ok,
         "optimal distance and k over n = 3..8:" + rows +
             fmt(" slope ratios empirical/theory: distance %.3f, k %.3f (need within 0.8..1.2); %.0f s", rd, rk,
                 t.seconds()));
}

}  // namespace

int main() {
  headline();
  u_shape();
  ordering();
  permutation_oracle();
  brownian_law();
  wasserstein_oracle();
  bridge_band();
  mlmc_separation();
  limit_regime();
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
