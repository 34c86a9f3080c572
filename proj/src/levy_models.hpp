#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "rng.hpp"

namespace levycouple {

// ---------------------------------------------------------------------------
// Jump laws for compound Poisson models. Every law exposes its quantile so
// jump sizes are drawn by inverse transform.
struct NormalJumps {
  double mean = 0.0;
  double sd = 1.0;
  bool operator==(const NormalJumps&) const = default;
};
struct ExponentialJumps {
  double rate = 1.0;
  bool operator==(const ExponentialJumps&) const = default;
};
struct UniformJumps {
  double lo = 0.0;
  double hi = 1.0;
  bool operator==(const UniformJumps&) const = default;
};
// Finite support; probabilities are normalised on construction of the model.
struct DiscreteJumps {
  std::vector<double> values;
  std::vector<double> probs;
  bool operator==(const DiscreteJumps&) const = default;
};
using JumpLaw = std::variant<NormalJumps, ExponentialJumps, UniformJumps, DiscreteJumps>;

double jump_law_quantile(const JumpLaw& law, double u);
// Raw moment E[J^p] for p in 1..4.
double jump_law_moment(const JumpLaw& law, int p);
// P(|J| > y), y >= 0.
double jump_law_abs_tail(const JumpLaw& law, double y);

// ---------------------------------------------------------------------------
// Model specifications. All variants describe a process standardised to mean
// 0 and variance 1 at t = 1.
struct LevyModelSpec;
using SpecPtr = std::shared_ptr<const LevyModelSpec>;

// Levy density c_neg |x|^{-alpha-1} on (-eps_hi, -eps_lo) plus
// c_pos x^{-alpha-1} on (eps_lo, eps_hi).
struct TruncatedStable {
  double alpha = 1.5;
  double c_neg = 0.4;
  double c_pos = 0.6;
  double eps_lo = 0.03;
  double eps_hi = 0.1;
  bool operator==(const TruncatedStable&) const = default;
};

struct CompoundPoissonDrift {
  double rate = 1.0;
  JumpLaw jumps = NormalJumps{};
  bool standardize = true;
  bool operator==(const CompoundPoissonDrift&) const = default;
};

// Gamma subordinator with X(1) ~ Gamma(shape, rate), centred and scaled.
struct GammaMartingale {
  double shape = 1.0;
  double rate = 1.0;
  bool operator==(const GammaMartingale&) const = default;
};

// sqrt(1 - eps^2) B + eps Y with Y the inner model.
struct PerturbedBM {
  double eps = 0.5;
  SpecPtr inner;
  bool operator==(const PerturbedBM& o) const;
};

struct BrownianMotion {
  bool operator==(const BrownianMotion&) const = default;
};

// Standardised compensated jumps of `base` whose magnitude lies in
// (eps_lo, eps_hi], thresholds in the base's unscaled jump units.
struct SmallJumpAnnulus {
  SpecPtr base;
  double eps_lo = 0.0;
  double eps_hi = 1.0;
  bool operator==(const SmallJumpAnnulus& o) const;
};

using ModelVariant = std::variant<TruncatedStable, CompoundPoissonDrift, GammaMartingale,
                                  PerturbedBM, BrownianMotion, SmallJumpAnnulus>;

struct LevyModelSpec {
  ModelVariant variant;
  // Variance of an optional independent Brownian component mixed in as
  // sqrt(1 - v) X + sqrt(v) B; 1e-12 is enough to break numerical ties.
  double jitter_variance = 0.0;
  bool operator==(const LevyModelSpec&) const = default;
};

SpecPtr make_spec(ModelVariant v, double jitter_variance = 0.0);

// ---------------------------------------------------------------------------
// A process sampled on the uniform grid {0, 1/cells, ..., 1}.
struct FinePath {
  std::vector<double> values;

  FinePath() = default;
  explicit FinePath(std::size_t cells) : values(cells + 1, 0.0) {}

  std::size_t cells() const { return values.empty() ? 0 : values.size() - 1; }
  // q with cells == 2^q, if the grid is dyadic.
  std::optional<int> dyadic_exponent() const;
  double endpoint() const { return values.back(); }
  double time(std::size_t j) const { return static_cast<double>(j) / static_cast<double>(cells()); }
};

std::size_t dyadic_cells(int q);

// Increments over the coarse grid {0, 1/k, ..., 1}; k must divide the cell count.
std::vector<double> increments_on_grid(const FinePath& path, std::size_t k);

// ---------------------------------------------------------------------------
// Compiled representation: a sum of independent compensated compound Poisson
// components, a Brownian part and gamma subordinators, each with a scale.

// Two-sided truncated power law; magnitudes on (lo, hi), positive with p_pos.
struct PowerLawJumps {
  double alpha;
  double lo;
  double hi;
  double p_pos;
};
struct LawJumps {
  JumpLaw law;
};
// Density proportional to x^{-1} e^{-b x} on (lo, hi].
struct GammaAnnulusJumps {
  double b;
  double lo;
  double hi;
};
using JumpSampler = std::variant<PowerLawJumps, LawJumps, GammaAnnulusJumps>;

struct JumpComponent {
  double rate = 0.0;  // expected jumps per unit time
  JumpSampler sampler;
  double scale = 1.0;
  // Raw per-jump moments E[J], E[J^2], E[J^4].
  double m1 = 0.0;
  double m2 = 0.0;
  double m4 = 0.0;

  double drift() const { return scale * rate * m1; }
  double draw(RngStream& rng) const;
  double abs_tail(double y) const;  // P(|scale J| > y)
};

struct GammaComponent {
  double shape;
  double rate;
  double scale;
};

struct SamplingLimits {
  double max_expected_jumps = 1e8;
};

class LevyProcess {
 public:
  std::vector<JumpComponent> jumps;
  std::vector<GammaComponent> gammas;
  double brownian_sd = 0.0;

  LevyProcess scaled(double c) const;
  void absorb(const LevyProcess& other);

  double expected_jumps() const;
  double variance() const;
  double jump_variance() const;
  double mu4() const;
  double tail(double x) const;

  // Exact values at grid points. Random draws per component, in order: jump
  // count, jump times, then sign and size per jump; afterwards the Brownian
  // increments and finally the gamma increments.
  FinePath sample_path(std::size_t cells, RngStream& rng, const SamplingLimits& limits = {},
                       std::size_t* jumps_drawn = nullptr) const;
  double sample_at(double t, RngStream& rng, const SamplingLimits& limits = {}) const;
};

struct ModelMoments {
  double mu4 = 0.0;
  double sigma2 = 0.0;  // jump variance before standardisation
  double jump_rate = 0.0;
  std::function<double(double)> tail;
};

class LevyModel {
 public:
  explicit LevyModel(LevyModelSpec spec);
  explicit LevyModel(const SpecPtr& spec) : LevyModel(*spec) {}

  const LevyModelSpec& spec() const { return spec_; }
  const LevyProcess& process() const { return process_; }
  const ModelMoments& moments() const { return moments_; }

 private:
  LevyModelSpec spec_;
  LevyProcess process_;
  ModelMoments moments_;
};

// Raw (unstandardised) Levy measure of a jump model restricted to magnitudes
// in (lo, hi], as compensated jump components with unit scale.
LevyProcess raw_annulus(const LevyModelSpec& base, double lo, double hi);
// Unstandardised second moment of the base's Levy measure over (lo, hi].
double raw_annulus_variance(const LevyModelSpec& base, double lo, double hi);

FinePath sample_fine_path(const LevyModel& model, int q, RngStream& rng,
                          const SamplingLimits& limits = {});
FinePath sample_path_on_grid(const LevyModel& model, std::size_t cells, RngStream& rng,
                             const SamplingLimits& limits = {});
double sample_endpoint(const LevyModel& model, RngStream& rng);
double sample_at(const LevyModel& model, double t, RngStream& rng);
const ModelMoments& model_moments(const LevyModel& model);

}  // namespace levycouple
