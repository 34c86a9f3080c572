#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "distribution.hpp"
#include "levy_models.hpp"
#include "metrics.hpp"
#include "mlmc.hpp"
#include "rng.hpp"

namespace levycouple {

struct ExperimentOutput {
  std::vector<std::string> files;
  std::vector<std::string> summary;  // human-readable lines
};

const std::vector<std::string>& experiment_names();

// Validates the config, then writes the experiment's CSV files under cfg.out.
ExperimentOutput run_experiment(const std::string& name, const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Building blocks. Every k value reuses the same replication streams, so the
// curves over k are computed on common random numbers.

struct KSweepPoint {
  std::size_t k1 = 1;
  std::size_t k2 = 1;  // second-level size, 1 for the plain coupling
  MsmdResult result;
};

std::vector<KSweepPoint> k_sweep(const LevyModel& model, CdfPtr endpoint, int q,
                                 const std::vector<std::size_t>& k1_values, std::size_t k2,
                                 std::size_t reps, const RngStream& rng);

// Powers of two 2^0 .. 2^max_exp.
std::vector<std::size_t> powers_of_two(int max_exp);

struct LimitRow {
  int n = 0;
  double mu4 = 0.0;
  double d_star = 0.0;
  double d_star_se = 0.0;
  std::size_t k_star = 1;
  double theory_log_d = 0.0;  // log(mu4 |log mu4|) / 4
  double theory_log_k = 0.0;  // log(|log mu4| / mu4) / 2
  std::vector<KSweepPoint> sweep;
};

// Jumps of the base stable measure in (2^-n-1, 2^-n), standardised.
LimitRow limit_regime_level(int n, int q, std::size_t reps, std::size_t endpoint_samples,
                            const RngStream& rng);

// Least-squares slope of ys against xs.
double fitted_slope(const std::vector<double>& xs, const std::vector<double>& ys);

struct LevelRow {
  CouplingMode mode = CouplingMode::independent;
  LevelSpec spec;
  LevelStats stats;
};

// Pair statistics for levels n_min..n_max in both modes. Both modes share the
// per-sample streams.
std::vector<LevelRow> level_table(const LevyModelSpec& base, Functional g, int n_min, int n_max,
                                  std::size_t samples, double p, std::size_t endpoint_samples,
                                  const RngStream& rng);

}  // namespace levycouple
