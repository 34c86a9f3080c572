#include "coupling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <numeric>

#include "errors.hpp"
#include "normal.hpp"

namespace levycouple {

namespace {

constexpr double kProbClamp = 1e-12;
constexpr double kPinTolerance = 1e-9;

void warn_dw_ties() {
  static std::atomic<bool> warned{false};
  if (!warned.exchange(true))
    std::clog << "levycouple: warning: tied Brownian increments, ordering by index\n";
}

// Reorders, within each of `parents` equal cells, the k sub-segments of
// `path` so that their increments follow the ranks of x's sub-increments.
void reorder_level(std::vector<double>& path, const FinePath& x, std::size_t parents, std::size_t k,
                   RngStream& rng, CouplingLevel& level, bool* dw_ties) {
  const std::size_t n = x.cells();
  const std::size_t cell = n / parents;
  const std::size_t sub = cell / k;
  level.k = k;
  level.permutations.reserve(parents);
  level.ties.reserve(parents * k);
  level.source_increments.reserve(parents * k);
  level.assembled_increments.reserve(parents * k);

  std::vector<double> out(path.size());
  out[0] = path[0];
  std::vector<double> ties(k), dx(k), dw(k);
  for (std::size_t p = 0; p < parents; ++p) {
    const std::size_t start = p * cell;
    for (auto& u : ties) u = rng.uniform();
    for (std::size_t j = 0; j < k; ++j) {
      dx[j] = x.values[start + (j + 1) * sub] - x.values[start + j * sub];
      dw[j] = path[start + (j + 1) * sub] - path[start + j * sub];
    }
    const std::vector<double> dx_snapped = snap_ties(dx);
    bool tied = false;
    Permutation perm = rank_permutation(dx_snapped, ties, dw, &tied);
    if (tied && dw_ties) *dw_ties = true;

    out[start] = path[start];
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t src = perm.pi[i] * sub + start;
      const std::size_t dst = i * sub + start;
      const double base = out[dst];
      for (std::size_t s = 1; s <= sub; ++s) out[dst + s] = base + (path[src + s] - path[src]);
      level.assembled_increments.push_back(dw[perm.pi[i]]);
    }
    const double end = path[start + cell];
    if (!(std::abs(out[start + cell] - end) < kPinTolerance))
      throw NumericalGuard("reordered path drifted from its cell endpoint");
    out[start + cell] = end;

    level.source_increments.insert(level.source_increments.end(), dw.begin(), dw.end());
    level.ties.insert(level.ties.end(), ties.begin(), ties.end());
    level.permutations.push_back(std::move(perm));
  }
  path = std::move(out);
}

}  // namespace

double endpoint_comonotone(double x1, const DistributionFunction& fx, double u) {
  require(u > 0.0 && u < 1.0, "endpoint uniform must lie in (0, 1)");
  const double p = std::clamp(fx.cdf_left(x1) + u * fx.atom(x1), kProbClamp, 1.0 - kProbClamp);
  return normal_quantile(p);
}

Permutation rank_permutation(std::span<const double> dx, std::span<const double> ties,
                             std::span<const double> dw, bool* dw_ties) {
  const std::size_t k = dx.size();
  require(ties.size() == k && dw.size() == k, "rank_permutation: length mismatch");
  std::vector<std::size_t> order_x(k), order_w(k);
  std::iota(order_x.begin(), order_x.end(), std::size_t{0});
  std::iota(order_w.begin(), order_w.end(), std::size_t{0});
  std::sort(order_x.begin(), order_x.end(), [&](std::size_t a, std::size_t b) {
    if (dx[a] != dx[b]) return dx[a] < dx[b];
    if (ties[a] != ties[b]) return ties[a] < ties[b];
    return a < b;
  });
  std::sort(order_w.begin(), order_w.end(), [&](std::size_t a, std::size_t b) {
    if (dw[a] != dw[b]) return dw[a] < dw[b];
    return a < b;
  });
  bool tied = false;
  for (std::size_t r = 1; r < k; ++r)
    if (dw[order_w[r]] == dw[order_w[r - 1]]) tied = true;
  if (tied) warn_dw_ties();
  if (dw_ties) *dw_ties = tied;

  Permutation out;
  out.pi.resize(k);
  for (std::size_t r = 0; r < k; ++r) out.pi[order_x[r]] = order_w[r];
  return out;
}

std::vector<std::size_t> rank_vector(std::span<const double> values, std::span<const double> tiebreak) {
  require(values.size() == tiebreak.size(), "rank_vector: length mismatch");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] < values[b];
    if (tiebreak[a] != tiebreak[b]) return tiebreak[a] < tiebreak[b];
    return a < b;
  });
  std::vector<std::size_t> rank(values.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
  return rank;
}

CoupledPaths couple_given(FinePath x, std::span<const std::size_t> ks,
                          const DistributionFunction& endpoint, RngStream& rng) {
  const std::size_t n = x.cells();
  require(n >= 1, "coupling needs a non-empty path");
  require(!ks.empty(), "coupling needs at least one level");
  std::size_t product = 1;
  for (std::size_t k : ks) {
    require(k >= 1, "level sizes must be >= 1");
    require(n % (product * k) == 0, "product of level sizes must divide the fine grid size");
    product *= k;
  }

  CoupledPaths out;
  out.ks.assign(ks.begin(), ks.end());
  const double w1 = endpoint_comonotone(x.endpoint(), endpoint, rng.uniform());
  out.endpoint_w1 = w1;

  FinePath wp(n);
  const double sd = std::sqrt(1.0 / static_cast<double>(n));
  for (std::size_t j = 1; j <= n; ++j) wp.values[j] = wp.values[j - 1] + sd * rng.normal();
  const double b1 = wp.values[n];
  for (std::size_t j = 1; j < n; ++j) {
    const double t = x.time(j);
    wp.values[j] += t * (w1 - b1);
  }
  wp.values[n] = w1;

  std::vector<double> path = wp.values;
  std::size_t parents = 1;
  for (std::size_t k : ks) {
    CouplingLevel level;
    reorder_level(path, x, parents, k, rng, level, &out.dw_ties);
    out.levels.push_back(std::move(level));
    parents *= k;
  }
  path[n] = w1;

  out.w.values = std::move(path);
  out.w_prime = std::move(wp);
  out.x = std::move(x);
  return out;
}

CoupledPaths hierarchical_coupling_on_grid(const LevyModel& model, std::span<const std::size_t> ks,
                                           std::size_t cells, const DistributionFunction& endpoint,
                                           RngStream& rng, const SamplingLimits& limits) {
  std::size_t product = 1;
  for (std::size_t k : ks) product *= std::max<std::size_t>(k, 1);
  require(!ks.empty() && cells % product == 0, "product of level sizes must divide the fine grid size");
  std::size_t jumps = 0;
  FinePath x = model.process().sample_path(cells, rng, limits, &jumps);
  CoupledPaths out = couple_given(std::move(x), ks, endpoint, rng);
  out.jumps_drawn = jumps;
  return out;
}

CoupledPaths hierarchical_coupling(const LevyModel& model, std::span<const std::size_t> ks, int q,
                                   const DistributionFunction& endpoint, RngStream& rng) {
  return hierarchical_coupling_on_grid(model, ks, dyadic_cells(q), endpoint, rng);
}

CoupledPaths reorder_coupling(const LevyModel& model, std::size_t k, int q,
                              const DistributionFunction& endpoint, RngStream& rng) {
  const std::size_t ks[] = {k};
  return hierarchical_coupling(model, ks, q, endpoint, rng);
}

TrivariatePaths trivariate_given(FinePath x, std::size_t k, const DistributionFunction& endpoint,
                                 const DistributionFunction& cdf_xk, RngStream& rng) {
  const std::size_t ks[] = {k};
  CoupledPaths c = couple_given(std::move(x), ks, endpoint, rng);
  const std::size_t n = c.x.cells();
  const std::size_t step = n / k;

  TrivariatePaths out;
  CouplingLevel& level = c.levels.front();
  out.ties = level.ties;
  out.w_increments = level.assembled_increments;
  out.pi = level.permutations.front();
  out.endpoint_w1 = c.endpoint_w1;

  const std::vector<double> dx = snap_ties(increments_on_grid(c.x, k));
  const double root_k = std::sqrt(static_cast<double>(k));
  out.xi.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double p = std::clamp(cdf_xk.cdf_left(dx[i]) + out.ties[i] * cdf_xk.atom(dx[i]), kProbClamp,
                                1.0 - kProbClamp);
    out.xi[i] = normal_quantile(p) / root_k;
  }

  out.w_hat = FinePath(n);
  auto& v = out.w_hat.values;
  const double sd = std::sqrt(1.0 / static_cast<double>(n));
  std::vector<double> partial(step + 1, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t s = 1; s <= step; ++s) partial[s] = partial[s - 1] + sd * rng.normal();
    const std::size_t start = i * step;
    for (std::size_t s = 1; s < step; ++s) {
      const double frac = static_cast<double>(s) / static_cast<double>(step);
      v[start + s] = v[start] + frac * out.xi[i] + (partial[s] - frac * partial[step]);
    }
    v[start + step] = v[start] + out.xi[i];
  }

  out.x = std::move(c.x);
  out.w = std::move(c.w);
  return out;
}

TrivariatePaths comonotone_increment_coupling(const LevyModel& model, std::size_t k, std::size_t cells,
                                              const DistributionFunction& endpoint,
                                              const DistributionFunction& cdf_xk, RngStream& rng) {
  require(k >= 1 && cells % k == 0, "k must divide the fine grid size");
  FinePath x = sample_path_on_grid(model, cells, rng);
  return trivariate_given(std::move(x), k, endpoint, cdf_xk, rng);
}

std::pair<double, double> empirical_rank_coupling(std::span<const double> xi, std::span<const double> zeta,
                                                  std::size_t u_index) {
  require(!xi.empty(), "rank coupling needs non-empty samples");
  require(xi.size() == zeta.size(), "rank coupling: length mismatch");
  require(u_index >= 1 && u_index <= xi.size(), "rank index must lie in 1..n");
  std::vector<double> a(xi.begin(), xi.end()), b(zeta.begin(), zeta.end());
  const auto r = static_cast<std::ptrdiff_t>(u_index - 1);
  std::nth_element(a.begin(), a.begin() + r, a.end());
  std::nth_element(b.begin(), b.begin() + r, b.end());
  return {a[u_index - 1], b[u_index - 1]};
}

KRecommendation recommended_k(double mu4) {
  require(mu4 > 0.0 && mu4 < 1.0, "k rule needs mu4 in (0, 1)");
  KRecommendation out;
  out.raw = std::sqrt(std::abs(std::log(mu4)) / mu4);
  const long e = std::max(0L, std::lround(std::log2(out.raw)));
  out.k = std::size_t{1} << std::min(e, 40L);
  return out;
}

}  // namespace levycouple
