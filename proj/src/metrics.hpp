#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "coupling.hpp"
#include "distribution.hpp"
#include "levy_models.hpp"
#include "rng.hpp"

namespace levycouple {

struct EstimateWithError {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

// Mean and sd/sqrt(n), both accumulated with compensated sums.
EstimateWithError mean_with_error(std::span<const double> xs);
// sqrt of a mean with the delta-method standard error.
EstimateWithError root_of(const EstimateWithError& e);

double sup_distance(const FinePath& a, const FinePath& b);
double sup_distance(const CoupledPaths& pair);

struct CouplingConfig {
  std::vector<std::size_t> ks{128};
  std::size_t cells = 4096;
  CdfPtr endpoint;  // law of X(1)
  SamplingLimits limits;
};

struct MsmdResult {
  EstimateWithError mean_sq_sup;  // E sup|X - W|^2
  EstimateWithError rms;          // its square root
  EstimateWithError endpoint_rmse;
  std::vector<double> sups;       // per replication, index order
  std::vector<double> endpoint_diffs;
};

// Replication r runs on rng.split(r).
MsmdResult msmd_estimate(const LevyModel& model, const CouplingConfig& config, std::size_t n_reps,
                         const RngStream& rng);

// RMS of W(1) - X(1); only endpoints are simulated.
EstimateWithError endpoint_rmse(const LevyModel& model, const DistributionFunction& endpoint,
                                std::size_t n_reps, const RngStream& rng);

double wasserstein2_empirical(std::span<const double> a, std::span<const double> b);

struct OrderingReport {
  bool pass = true;
  std::size_t mismatches = 0;
};
OrderingReport ordering_diagnostics(const TrivariatePaths& run);

}  // namespace levycouple
