#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "distribution.hpp"
#include "levy_models.hpp"
#include "rng.hpp"

namespace levycouple {

// Level n pairs X_n and X_{n+1}, where X_n keeps the jumps larger than
// eps_n = 2^-n and replaces the smaller ones by a Brownian motion of equal
// variance. Thresholds refer to the base model's raw jump sizes.
struct LevelSpec {
  int n = 0;
  double eps_n = 1.0;
  double sigma_prime_sq = 0.0;  // variance of the jumps in (eps_{n+1}, eps_n]
  double sigma_next_sq = 0.0;   // variance of the jumps below eps_{n+1}
  double annulus_mu4 = 0.0;     // of the standardised annulus martingale
  std::size_t k_prime = 1;
  std::size_t m_n = 1;          // coarse grid cells
  std::size_t m_fine = 1;       // cells of the grid the pair is simulated on
  double p = 1.5;
  bool degenerate = false;
};

struct LevelDecomposition {
  LevelSpec spec;
  SpecPtr annulus_model;  // standardised annulus, for inspection
  LevyProcess annulus;    // raw compensated jumps in (eps_{n+1}, eps_n]
  LevyProcess remainder;  // jumps above eps_n plus sigma_{n+1} B
};

// Grids grow as 2^round(p n) but stay put across degenerate levels, so that
// a level without annulus jumps contributes exactly zero.
LevelDecomposition decompose_level(const LevyModelSpec& base, int n, double p = 1.5);

// X_n alone on its own grid of m_n cells.
FinePath sample_approximation(const LevyModelSpec& base, int n, double p, RngStream& rng);

enum class Functional { terminal, supremum, integral };
enum class CouplingMode { independent, reordering };

const char* functional_name(Functional g);
const char* mode_name(CouplingMode m);
std::optional<Functional> parse_functional(const std::string& s);
std::optional<CouplingMode> parse_mode(const std::string& s);

// g on the subgrid {0, stride, 2 stride, ...} of a path.
double evaluate(Functional g, const FinePath& path, std::size_t stride = 1);

struct PairSample {
  double g_fine = 0.0;
  double g_coarse = 0.0;
  double cost = 0.0;
};

// Law of M'(1)/sigma' for the comonotone endpoint map, from m draws.
CdfPtr level_endpoint_cache(const LevelDecomposition& level, std::size_t m, const RngStream& rng);

// Draws: remainder path, annulus path, then either a fresh Brownian path or
// the coupling draws. The cache is required in reordering mode.
PairSample sample_coupled_pair(const LevelDecomposition& level, CouplingMode mode, Functional g,
                               RngStream& rng, const DistributionFunction* cache = nullptr);

struct LevelStats {
  int level = 0;  // MLMC level: 0 is X_0 alone, l >= 1 pairs (X_{l-1}, X_l)
  double mean_diff = 0.0;
  double var_diff = 0.0;
  double cost = 0.0;  // average work per sample
  std::size_t n_samples = 0;
  std::vector<double> diffs;
  double total_cost = 0.0;

  void refresh();
};

// Level 0 sample: g(X_0) with cost.
PairSample sample_base_level(const LevyModelSpec& base, Functional g, double p, RngStream& rng);

// Sample i uses rng.split(i).
LevelStats estimate_level_stats(const LevelDecomposition& level, CouplingMode mode, Functional g,
                                std::size_t n_samples, const RngStream& rng,
                                const DistributionFunction* cache = nullptr);

struct MlmcOptions {
  double p = 1.5;
  std::size_t pilot_samples = 200;
  std::size_t endpoint_samples = 30000;
  int min_levels = 3;
  int max_level = 8;
};

struct MlmcResult {
  double estimate = 0.0;
  double estimator_variance = 0.0;
  double bias_estimate = 0.0;
  double total_cost = 0.0;
  bool converged = false;
  std::vector<LevelStats> levels;
  std::vector<LevelSpec> specs;  // specs[l] describes level l >= 1; specs[0] is a placeholder
  std::string note;
};

MlmcResult mlmc_run(const LevyModelSpec& base, Functional g, CouplingMode mode, double delta,
                    const RngStream& rng, const MlmcOptions& options = {});

}  // namespace levycouple
