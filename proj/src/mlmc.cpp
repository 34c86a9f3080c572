#include "mlmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coupling.hpp"
#include "errors.hpp"
#include "metrics.hpp"
#include "parallel.hpp"

namespace levycouple {

namespace {

constexpr std::uint64_t kCacheStream = 1'000'000;

double level_eps(int n) { return std::ldexp(1.0, -n); }

void check_base(const LevyModelSpec& base) {
  const bool ok = std::holds_alternative<TruncatedStable>(base.variant) ||
                  std::holds_alternative<SmallJumpAnnulus>(base.variant);
  require(ok, "multilevel driver needs a truncated-stable or annulus base model");
  LevyModel check(base);  // validates parameters
  (void)check;
}

bool annulus_empty(const LevyModelSpec& base, int n) {
  return !(raw_annulus_variance(base, level_eps(n + 1), level_eps(n)) > 0.0);
}

std::size_t nominal_cells(int n, double p) {
  const long e = std::lround(p * n);
  require(e >= 0 && e <= 30, "grid size 2^(p n) out of range");
  return std::size_t{1} << e;
}

// m_n for the coarse side of level n.
std::size_t coarse_cells(const LevyModelSpec& base, int n, double p) {
  std::size_t m = 1;
  for (int j = 0; j < n; ++j)
    if (!annulus_empty(base, j)) m = std::max(m, nominal_cells(j + 1, p));
  return m;
}

LevyProcess approximation_process(const LevyModelSpec& base, int n) {
  LevyProcess p = raw_annulus(base, level_eps(n), std::numeric_limits<double>::infinity());
  p.brownian_sd = std::sqrt(raw_annulus_variance(base, 0.0, level_eps(n)));
  return p;
}

void extend(LevelStats& stats, std::size_t count, const RngStream& rng,
            const std::function<PairSample(RngStream&)>& draw) {
  const std::size_t first = stats.n_samples;
  std::vector<PairSample> got(count);
  parallel_for(count, [&](std::size_t i) {
    RngStream s = rng.split(first + i);
    got[i] = draw(s);
  });
  for (const auto& g : got) {
    stats.diffs.push_back(g.g_fine - g.g_coarse);
    stats.total_cost += g.cost;
  }
  stats.refresh();
}

}  // namespace

void LevelStats::refresh() {
  n_samples = diffs.size();
  const EstimateWithError e = mean_with_error(diffs);
  mean_diff = e.mean;
  var_diff = n_samples >= 2 ? e.std_error * e.std_error * static_cast<double>(n_samples) : 0.0;
  cost = n_samples ? total_cost / static_cast<double>(n_samples) : 0.0;
}

LevelDecomposition decompose_level(const LevyModelSpec& base, int n, double p) {
  check_base(base);
  require(n >= 0 && n < 40, "level index must lie in [0, 40)");
  require(p > 0.0 && std::isfinite(p), "discretisation exponent must be positive");
  LevelDecomposition d;
  LevelSpec& s = d.spec;
  s.n = n;
  s.p = p;
  s.eps_n = level_eps(n);
  const double eps_next = level_eps(n + 1);
  d.annulus = raw_annulus(base, eps_next, s.eps_n);
  s.sigma_prime_sq = d.annulus.jump_variance();
  s.sigma_next_sq = raw_annulus_variance(base, 0.0, eps_next);
  s.degenerate = !(s.sigma_prime_sq > 0.0);
  s.m_n = coarse_cells(base, n, p);
  s.m_fine = s.degenerate ? s.m_n : std::max(s.m_n, nominal_cells(n + 1, p));

  d.remainder = raw_annulus(base, s.eps_n, std::numeric_limits<double>::infinity());
  d.remainder.brownian_sd = std::sqrt(s.sigma_next_sq);

  if (!s.degenerate) {
    d.annulus_model = make_spec(SmallJumpAnnulus{make_spec(base.variant), eps_next, s.eps_n});
    s.annulus_mu4 = d.annulus.mu4() / (s.sigma_prime_sq * s.sigma_prime_sq);
    if (s.annulus_mu4 > 0.0 && s.annulus_mu4 < 1.0) s.k_prime = recommended_k(s.annulus_mu4).k;
    s.k_prime = std::min(s.k_prime, s.m_n);
  }
  return d;
}

FinePath sample_approximation(const LevyModelSpec& base, int n, double p, RngStream& rng) {
  check_base(base);
  return approximation_process(base, n).sample_path(coarse_cells(base, n, p), rng);
}

const char* functional_name(Functional g) {
  switch (g) {
    case Functional::terminal: return "terminal";
    case Functional::supremum: return "supremum";
    case Functional::integral: return "integral";
  }
  return "?";
}

const char* mode_name(CouplingMode m) {
  return m == CouplingMode::independent ? "independent" : "reordering";
}

std::optional<Functional> parse_functional(const std::string& s) {
  if (s == "terminal") return Functional::terminal;
  if (s == "supremum") return Functional::supremum;
  if (s == "integral") return Functional::integral;
  return std::nullopt;
}

std::optional<CouplingMode> parse_mode(const std::string& s) {
  if (s == "independent") return CouplingMode::independent;
  if (s == "reordering") return CouplingMode::reordering;
  return std::nullopt;
}

double evaluate(Functional g, const FinePath& path, std::size_t stride) {
  const auto& v = path.values;
  require(stride >= 1 && path.cells() % stride == 0, "stride must divide the grid");
  switch (g) {
    case Functional::terminal:
      return v.back();
    case Functional::supremum: {
      double m = v[0];
      for (std::size_t j = stride; j < v.size(); j += stride) m = std::max(m, v[j]);
      return m;
    }
    case Functional::integral: {
      const std::size_t cells = path.cells() / stride;
      double s = 0.5 * (v.front() + v.back());
      for (std::size_t j = stride; j + stride < v.size(); j += stride) s += v[j];
      return s / static_cast<double>(cells);
    }
  }
  return 0.0;
}

CdfPtr level_endpoint_cache(const LevelDecomposition& level, std::size_t m, const RngStream& rng) {
  require(!level.spec.degenerate, "degenerate level has no annulus endpoint law");
  require(m >= 1, "endpoint cache needs at least one draw");
  const double sp = std::sqrt(level.spec.sigma_prime_sq);
  std::vector<double> draws(m);
  parallel_for(m, [&](std::size_t i) {
    RngStream s = rng.split(i);
    draws[i] = level.annulus.sample_at(1.0, s) / sp;
  });
  return std::make_shared<const EmpiricalCdf>(std::move(draws));
}

PairSample sample_coupled_pair(const LevelDecomposition& level, CouplingMode mode, Functional g,
                               RngStream& rng, const DistributionFunction* cache) {
  const LevelSpec& s = level.spec;
  const std::size_t m = s.m_fine;
  const std::size_t stride = m / s.m_n;
  std::size_t jumps_r = 0, jumps_m = 0;
  FinePath r = level.remainder.sample_path(m, rng, {}, &jumps_r);
  FinePath a = level.annulus.sample_path(m, rng, {}, &jumps_m);

  PairSample out;
  out.cost = static_cast<double>(jumps_r + jumps_m + m + 1);
  FinePath fine(m);
  for (std::size_t j = 0; j <= m; ++j) fine.values[j] = r.values[j] + a.values[j];
  out.g_fine = evaluate(g, fine, 1);
  if (s.degenerate) {
    out.g_coarse = evaluate(g, r, stride);
    return out;
  }

  const double sp = std::sqrt(s.sigma_prime_sq);
  FinePath w;
  if (mode == CouplingMode::independent) {
    w = FinePath(m);
    const double sd = std::sqrt(1.0 / static_cast<double>(m));
    for (std::size_t j = 1; j <= m; ++j) w.values[j] = w.values[j - 1] + sd * rng.normal();
  } else {
    require(cache != nullptr, "reordering mode needs an endpoint distribution");
    FinePath xs(m);
    for (std::size_t j = 0; j <= m; ++j) xs.values[j] = a.values[j] / sp;
    const std::size_t ks[] = {s.k_prime};
    w = std::move(couple_given(std::move(xs), ks, *cache, rng).w);
    const double k = static_cast<double>(s.k_prime);
    out.cost += k * std::log2(k);
  }
  FinePath coarse(m);
  for (std::size_t j = 0; j <= m; ++j) coarse.values[j] = r.values[j] + sp * w.values[j];
  out.g_coarse = evaluate(g, coarse, stride);
  return out;
}

PairSample sample_base_level(const LevyModelSpec& base, Functional g, double p, RngStream& rng) {
  check_base(base);
  const LevyProcess proc = approximation_process(base, 0);
  const std::size_t m = coarse_cells(base, 0, p);
  std::size_t jumps = 0;
  FinePath x = proc.sample_path(m, rng, {}, &jumps);
  PairSample out;
  out.g_fine = evaluate(g, x, 1);
  out.cost = static_cast<double>(jumps + m + 1);
  return out;
}

LevelStats estimate_level_stats(const LevelDecomposition& level, CouplingMode mode, Functional g,
                                std::size_t n_samples, const RngStream& rng,
                                const DistributionFunction* cache) {
  require(n_samples >= 2, "need at least two samples per level");
  LevelStats stats;
  stats.level = level.spec.n + 1;
  CdfPtr own;
  if (mode == CouplingMode::reordering && !level.spec.degenerate && cache == nullptr) {
    own = level_endpoint_cache(level, 30000, rng.split(kCacheStream));
    cache = own.get();
  }
  extend(stats, n_samples, rng,
         [&](RngStream& s) { return sample_coupled_pair(level, mode, g, s, cache); });
  return stats;
}

MlmcResult mlmc_run(const LevyModelSpec& base, Functional g, CouplingMode mode, double delta,
                    const RngStream& rng, const MlmcOptions& options) {
  require(delta > 0.0 && std::isfinite(delta), "target accuracy must be positive");
  require(options.min_levels >= 2, "need at least two levels");
  require(options.max_level >= options.min_levels - 1, "max level below the minimum level count");
  require(options.pilot_samples >= 2, "pilot needs at least two samples");
  check_base(base);

  MlmcResult res;
  std::vector<LevelDecomposition> decomp(1);
  std::vector<CdfPtr> caches(1);
  std::vector<std::function<PairSample(RngStream&)>> draws;

  auto add_level = [&]() {
    const int l = static_cast<int>(res.levels.size());
    LevelStats st;
    st.level = l;
    res.levels.push_back(std::move(st));
    if (l == 0) {
      res.specs.emplace_back();
      draws.emplace_back([&base, g, &options](RngStream& s) { return sample_base_level(base, g, options.p, s); });
      return;
    }
    decomp.push_back(decompose_level(base, l - 1, options.p));
    res.specs.push_back(decomp.back().spec);
    CdfPtr cache;
    if (mode == CouplingMode::reordering && !decomp.back().spec.degenerate)
      cache = level_endpoint_cache(decomp.back(), options.endpoint_samples, rng.split(kCacheStream + l));
    caches.push_back(cache);
    draws.emplace_back([&decomp, &caches, l, mode, g](RngStream& s) {
      return sample_coupled_pair(decomp[l], mode, g, s, caches[l].get());
    });
  };

  for (int l = 0; l < options.min_levels; ++l) add_level();
  for (;;) {
    for (std::size_t l = 0; l < res.levels.size(); ++l)
      if (res.levels[l].n_samples == 0) extend(res.levels[l], options.pilot_samples, rng.split(l), draws[l]);

    double sum_vc = 0.0;
    for (const auto& s : res.levels) sum_vc += std::sqrt(s.var_diff * s.cost);
    for (std::size_t l = 0; l < res.levels.size(); ++l) {
      auto& s = res.levels[l];
      const double target =
          std::ceil(2.0 / (delta * delta) * std::sqrt(s.var_diff / s.cost) * sum_vc);
      if (std::isfinite(target) && target > static_cast<double>(s.n_samples))
        extend(s, static_cast<std::size_t>(target) - s.n_samples, rng.split(l), draws[l]);
    }

    // Geometric decay rate of |mean| from the finest levels, at least 0.5.
    const int L = static_cast<int>(res.levels.size()) - 1;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int pts = 0;
    for (int l = 1; l <= L; ++l) {
      const double m = std::abs(res.levels[l].mean_diff);
      if (!(m > 0.0)) continue;
      const double y = std::log2(m);
      sx += l;
      sy += y;
      sxx += double(l) * l;
      sxy += l * y;
      ++pts;
    }
    double alpha = 0.5;
    if (pts >= 2) alpha = std::max(0.5, -(pts * sxy - sx * sy) / (pts * sxx - sx * sx));
    const double r = std::exp2(alpha);
    const double bias = std::max(std::abs(res.levels[L].mean_diff),
                                 std::abs(res.levels[L - 1].mean_diff) / r) /
                        (r - 1.0);
    res.bias_estimate = bias;
    if (bias < delta / std::sqrt(2.0)) {
      res.converged = true;
      break;
    }
    if (L >= options.max_level) {
      res.note = "maximum level reached before the bias criterion was met";
      break;
    }
    add_level();
  }

  for (const auto& s : res.levels) {
    res.estimate += s.mean_diff;
    res.estimator_variance += s.var_diff / static_cast<double>(s.n_samples);
    res.total_cost += s.total_cost;
  }
  return res;
}

}  // namespace levycouple
