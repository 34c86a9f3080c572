#include "metrics.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "parallel.hpp"
#include "summation.hpp"

namespace levycouple {

EstimateWithError mean_with_error(std::span<const double> xs) {
  EstimateWithError e;
  e.n = xs.size();
  if (xs.empty()) return e;
  e.mean = compensated_sum(xs) / static_cast<double>(xs.size());
  if (xs.size() < 2) return e;
  CompensatedSum ss;
  for (double x : xs) ss.add((x - e.mean) * (x - e.mean));
  const double var = ss.value() / static_cast<double>(xs.size() - 1);
  e.std_error = std::sqrt(var / static_cast<double>(xs.size()));
  return e;
}

EstimateWithError root_of(const EstimateWithError& e) {
  EstimateWithError r;
  r.n = e.n;
  r.mean = std::sqrt(std::max(0.0, e.mean));
  r.std_error = r.mean > 0.0 ? e.std_error / (2.0 * r.mean) : 0.0;
  return r;
}

double sup_distance(const FinePath& a, const FinePath& b) {
  require(a.values.size() == b.values.size(), "paths live on different grids");
  double m = 0.0;
  for (std::size_t j = 0; j < a.values.size(); ++j) m = std::max(m, std::abs(a.values[j] - b.values[j]));
  return m;
}

double sup_distance(const CoupledPaths& pair) { return sup_distance(pair.x, pair.w); }

MsmdResult msmd_estimate(const LevyModel& model, const CouplingConfig& config, std::size_t n_reps,
                         const RngStream& rng) {
  require(n_reps >= 2, "need at least two replications");
  require(config.endpoint != nullptr, "coupling config needs an endpoint distribution");
  MsmdResult out;
  out.sups.resize(n_reps);
  out.endpoint_diffs.resize(n_reps);
  parallel_for(n_reps, [&](std::size_t r) {
    RngStream s = rng.split(r);
    CoupledPaths p =
        hierarchical_coupling_on_grid(model, config.ks, config.cells, *config.endpoint, s, config.limits);
    out.sups[r] = sup_distance(p);
    out.endpoint_diffs[r] = p.w.endpoint() - p.x.endpoint();
  });
  std::vector<double> sq(n_reps), ed(n_reps);
  for (std::size_t r = 0; r < n_reps; ++r) {
    sq[r] = out.sups[r] * out.sups[r];
    ed[r] = out.endpoint_diffs[r] * out.endpoint_diffs[r];
  }
  out.mean_sq_sup = mean_with_error(sq);
  out.rms = root_of(out.mean_sq_sup);
  out.endpoint_rmse = root_of(mean_with_error(ed));
  return out;
}

EstimateWithError endpoint_rmse(const LevyModel& model, const DistributionFunction& endpoint,
                                std::size_t n_reps, const RngStream& rng) {
  require(n_reps >= 2, "need at least two replications");
  std::vector<double> sq(n_reps);
  parallel_for(n_reps, [&](std::size_t r) {
    RngStream s = rng.split(r);
    const double x1 = sample_endpoint(model, s);
    const double w1 = endpoint_comonotone(x1, endpoint, s.uniform());
    sq[r] = (w1 - x1) * (w1 - x1);
  });
  return root_of(mean_with_error(sq));
}

double wasserstein2_empirical(std::span<const double> a, std::span<const double> b) {
  require(!a.empty(), "empty sample");
  require(a.size() == b.size(), "samples differ in size");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  CompensatedSum s;
  for (std::size_t i = 0; i < x.size(); ++i) s.add((x[i] - y[i]) * (x[i] - y[i]));
  return std::sqrt(s.value() / static_cast<double>(x.size()));
}

OrderingReport ordering_diagnostics(const TrivariatePaths& run) {
  OrderingReport rep;
  const auto a = rank_vector(run.xi, run.ties);
  const auto b = rank_vector(run.w_increments, run.ties);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) ++rep.mismatches;
  rep.pass = rep.mismatches == 0 && a.size() == b.size();
  return rep;
}

}  // namespace levycouple
