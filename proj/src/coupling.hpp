#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "distribution.hpp"
#include "levy_models.hpp"
#include "rng.hpp"

namespace levycouple {

// pi[i] is the source cell whose increment lands in cell i. Indices are
// zero-based here; the C API reports them one-based.
struct Permutation {
  std::vector<std::size_t> pi;
  std::size_t size() const { return pi.size(); }
  bool operator==(const Permutation&) const = default;
};

// One reordering pass: within each parent cell, k sub-cells are permuted.
struct CouplingLevel {
  std::size_t k = 1;
  std::vector<Permutation> permutations;  // one per parent cell
  std::vector<double> ties;               // tie uniforms, parent cells concatenated
  // Sub-cell increments of the path before and after the permutation, parent
  // cells concatenated. After is a rearrangement of before, bit for bit.
  std::vector<double> source_increments;
  std::vector<double> assembled_increments;
};

struct CoupledPaths {
  FinePath x;
  FinePath w;
  FinePath w_prime;
  std::vector<CouplingLevel> levels;
  double endpoint_w1 = 0.0;
  std::vector<std::size_t> ks;
  std::size_t jumps_drawn = 0;
  bool dw_ties = false;
};

struct TrivariatePaths {
  FinePath x;
  FinePath w;
  FinePath w_hat;
  std::vector<double> ties;
  std::vector<double> xi;             // increments of w_hat over the k-grid
  std::vector<double> w_increments;   // increments of w over the k-grid
  Permutation pi;
  double endpoint_w1 = 0.0;
};

double endpoint_comonotone(double x1, const DistributionFunction& fx, double u);

// Sorts cells by (dx, ties) lexicographically and hands them the dw values in
// ascending order. Equal dw values are ordered by index and flagged.
Permutation rank_permutation(std::span<const double> dx, std::span<const double> ties,
                             std::span<const double> dw, bool* dw_ties = nullptr);

// Rank (0-based) of each entry, ties in value resolved by `tiebreak`.
std::vector<std::size_t> rank_vector(std::span<const double> values, std::span<const double> tiebreak);

// Random draws after those of X: endpoint uniform, one normal per fine cell
// for W', one tie uniform per cell of the first level, then per deeper level
// one tie uniform per sub-cell.
CoupledPaths reorder_coupling(const LevyModel& model, std::size_t k, int q,
                              const DistributionFunction& endpoint, RngStream& rng);
CoupledPaths hierarchical_coupling(const LevyModel& model, std::span<const std::size_t> ks, int q,
                                   const DistributionFunction& endpoint, RngStream& rng);
CoupledPaths hierarchical_coupling_on_grid(const LevyModel& model, std::span<const std::size_t> ks,
                                           std::size_t cells, const DistributionFunction& endpoint,
                                           RngStream& rng, const SamplingLimits& limits = {});
// Couples a Brownian path to an already sampled X.
CoupledPaths couple_given(FinePath x, std::span<const std::size_t> ks,
                          const DistributionFunction& endpoint, RngStream& rng);

// W and the comonotone-increment path on shared (dX, U). cdf_xk describes
// X(1/k); endpoint describes X(1). After the draws of couple_given for a
// single level, one normal per fine cell feeds the bridges of w_hat.
TrivariatePaths comonotone_increment_coupling(const LevyModel& model, std::size_t k, std::size_t cells,
                                              const DistributionFunction& endpoint,
                                              const DistributionFunction& cdf_xk, RngStream& rng);
TrivariatePaths trivariate_given(FinePath x, std::size_t k, const DistributionFunction& endpoint,
                                 const DistributionFunction& cdf_xk, RngStream& rng);

// Order statistics of rank u_index (1-based) of both samples.
std::pair<double, double> empirical_rank_coupling(std::span<const double> xi, std::span<const double> zeta,
                                                  std::size_t u_index);

struct KRecommendation {
  double raw = 0.0;
  std::size_t k = 1;
};
KRecommendation recommended_k(double mu4);

}  // namespace levycouple
