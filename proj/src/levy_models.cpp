#include "levy_models.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "errors.hpp"
#include "normal.hpp"

namespace levycouple {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool finite(double x) { return std::isfinite(x); }

// Integral of x^{p - alpha - 1} over (lo, hi).
double power_integral(double p, double alpha, double lo, double hi) {
  const double e = p - alpha;
  if (std::abs(e) < 1e-14) return std::log(hi / lo);
  return (std::pow(hi, e) - std::pow(lo, e)) / e;
}

double e1(double x) {
  if (x <= 0.0) return std::numeric_limits<double>::infinity();
  return boost::math::expint(1, x);
}

void validate_law(const JumpLaw& law) {
  std::visit(Overloaded{
                 [](const NormalJumps& j) {
                   require(finite(j.mean) && finite(j.sd) && j.sd >= 0.0,
                           "normal jumps need finite mean and sd >= 0");
                 },
                 [](const ExponentialJumps& j) {
                   require(finite(j.rate) && j.rate > 0.0, "exponential jumps need rate > 0");
                 },
                 [](const UniformJumps& j) {
                   require(finite(j.lo) && finite(j.hi) && j.lo < j.hi,
                           "uniform jumps need lo < hi");
                 },
                 [](const DiscreteJumps& j) {
                   require(!j.values.empty() && j.values.size() == j.probs.size(),
                           "discrete jumps need matching, non-empty values and probs");
                   double total = 0.0;
                   for (std::size_t i = 0; i < j.values.size(); ++i) {
                     require(finite(j.values[i]) && finite(j.probs[i]) && j.probs[i] >= 0.0,
                             "discrete jump probabilities must be finite and >= 0");
                     total += j.probs[i];
                   }
                   require(total > 0.0, "discrete jump probabilities must not all be zero");
                 },
             },
             law);
}

// Sorted by value, probabilities normalised to sum to one.
JumpLaw normalise_law(const JumpLaw& law) {
  if (const auto* d = std::get_if<DiscreteJumps>(&law)) {
    std::vector<std::size_t> idx(d->values.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return d->values[a] < d->values[b]; });
    const double total = std::accumulate(d->probs.begin(), d->probs.end(), 0.0);
    DiscreteJumps out;
    for (std::size_t i : idx) {
      out.values.push_back(d->values[i]);
      out.probs.push_back(d->probs[i] / total);
    }
    return out;
  }
  return law;
}

JumpComponent power_law_component(double alpha, double c_neg, double c_pos, double lo, double hi) {
  const double side_mass = power_integral(0.0, alpha, lo, hi);
  const double w_pos = c_pos * side_mass;
  const double w_neg = c_neg * side_mass;
  JumpComponent c;
  c.rate = w_pos + w_neg;
  const double p_pos = w_pos / (w_pos + w_neg);
  c.sampler = PowerLawJumps{alpha, lo, hi, p_pos};
  c.m1 = (2.0 * p_pos - 1.0) * power_integral(1.0, alpha, lo, hi) / side_mass;
  c.m2 = power_integral(2.0, alpha, lo, hi) / side_mass;
  c.m4 = power_integral(4.0, alpha, lo, hi) / side_mass;
  return c;
}

JumpComponent gamma_annulus_component(double shape, double b, double lo, double hi) {
  JumpComponent c;
  c.rate = shape * (e1(b * lo) - e1(b * hi));
  c.sampler = GammaAnnulusJumps{b, lo, hi};
  auto moment = [&](double p) {
    using boost::math::tgamma_lower;
    return shape * std::pow(b, -p) * (tgamma_lower(p, b * hi) - tgamma_lower(p, b * lo)) / c.rate;
  };
  c.m1 = moment(1.0);
  c.m2 = moment(2.0);
  c.m4 = moment(4.0);
  return c;
}

JumpComponent law_component(double rate, const JumpLaw& law) {
  JumpComponent c;
  c.rate = rate;
  c.sampler = LawJumps{normalise_law(law)};
  c.m1 = jump_law_moment(law, 1);
  c.m2 = jump_law_moment(law, 2);
  c.m4 = jump_law_moment(law, 4);
  return c;
}

LevyProcess standardised(LevyProcess p) {
  const double v = p.variance();
  if (v > 0.0) return p.scaled(1.0 / std::sqrt(v));
  return p;
}

struct Compiled {
  LevyProcess process;
  double sigma2 = 0.0;
};

Compiled compile(const LevyModelSpec& spec) {
  require(finite(spec.jitter_variance) && spec.jitter_variance >= 0.0 &&
              spec.jitter_variance < 1.0,
          "jitter variance must lie in [0, 1)");
  Compiled out = std::visit(
      Overloaded{
          [](const TruncatedStable& m) {
            require(finite(m.alpha) && m.alpha > 0.0 && m.alpha < 2.0,
                    "stability index alpha must lie in (0, 2)");
            require(finite(m.c_neg) && finite(m.c_pos) && m.c_neg >= 0.0 && m.c_pos >= 0.0 &&
                        m.c_neg + m.c_pos > 0.0,
                    "side weights must be >= 0 with at least one positive");
            require(finite(m.eps_hi) && m.eps_lo > 0.0 && m.eps_lo < m.eps_hi,
                    "truncation needs 0 < eps_lo < eps_hi");
            LevyProcess p;
            p.jumps.push_back(power_law_component(m.alpha, m.c_neg, m.c_pos, m.eps_lo, m.eps_hi));
            const double s2 = p.jump_variance();
            return Compiled{standardised(p), s2};
          },
          [](const CompoundPoissonDrift& m) {
            require(finite(m.rate) && m.rate >= 0.0, "jump rate must be finite and >= 0");
            validate_law(m.jumps);
            LevyProcess p;
            if (m.rate > 0.0) p.jumps.push_back(law_component(m.rate, m.jumps));
            const double s2 = p.jump_variance();
            return Compiled{m.standardize ? standardised(p) : p, s2};
          },
          [](const GammaMartingale& m) {
            require(finite(m.shape) && finite(m.rate) && m.shape > 0.0 && m.rate > 0.0,
                    "gamma shape and rate must be positive");
            LevyProcess p;
            p.gammas.push_back({m.shape, m.rate, m.rate / std::sqrt(m.shape)});
            return Compiled{p, m.shape / (m.rate * m.rate)};
          },
          [](const PerturbedBM& m) {
            require(m.inner != nullptr, "perturbed model needs an inner model");
            require(finite(m.eps) && m.eps > 0.0 && m.eps <= 1.0, "perturbation eps must lie in (0, 1]");
            LevyProcess p = compile(*m.inner).process.scaled(m.eps);
            const double bsd2 = p.brownian_sd * p.brownian_sd + (1.0 - m.eps * m.eps);
            p.brownian_sd = std::sqrt(bsd2);
            return Compiled{p, p.jump_variance()};
          },
          [](const BrownianMotion&) {
            LevyProcess p;
            p.brownian_sd = 1.0;
            return Compiled{p, 0.0};
          },
          [](const SmallJumpAnnulus& m) {
            require(m.base != nullptr, "annulus model needs a base model");
            require(finite(m.eps_hi) && m.eps_lo >= 0.0 && m.eps_lo < m.eps_hi,
                    "annulus needs 0 <= eps_lo < eps_hi");
            LevyProcess p = raw_annulus(*m.base, m.eps_lo, m.eps_hi);
            const double s2 = p.jump_variance();
            return Compiled{standardised(p), s2};
          },
      },
      spec.variant);
  if (spec.jitter_variance > 0.0) {
    const double v = spec.jitter_variance;
    LevyProcess p = out.process.scaled(std::sqrt(1.0 - v));
    p.brownian_sd = std::sqrt(p.brownian_sd * p.brownian_sd + v);
    out.process = p;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

bool PerturbedBM::operator==(const PerturbedBM& o) const {
  if (eps != o.eps) return false;
  if (!inner || !o.inner) return inner == o.inner;
  return *inner == *o.inner;
}

bool SmallJumpAnnulus::operator==(const SmallJumpAnnulus& o) const {
  if (eps_lo != o.eps_lo || eps_hi != o.eps_hi) return false;
  if (!base || !o.base) return base == o.base;
  return *base == *o.base;
}

SpecPtr make_spec(ModelVariant v, double jitter_variance) {
  return std::make_shared<const LevyModelSpec>(LevyModelSpec{std::move(v), jitter_variance});
}

double jump_law_quantile(const JumpLaw& law, double u) {
  return std::visit(Overloaded{
                        [u](const NormalJumps& j) { return j.mean + j.sd * normal_quantile(u); },
                        [u](const ExponentialJumps& j) { return -std::log1p(-u) / j.rate; },
                        [u](const UniformJumps& j) { return j.lo + u * (j.hi - j.lo); },
                        [u](const DiscreteJumps& j) {
                          double acc = 0.0;
                          for (std::size_t i = 0; i < j.values.size(); ++i) {
                            acc += j.probs[i];
                            if (acc >= u) return j.values[i];
                          }
                          return j.values.back();
                        },
                    },
                    law);
}

double jump_law_moment(const JumpLaw& law, int p) {
  require(p >= 1 && p <= 4, "jump moments are available for orders 1..4");
  return std::visit(
      Overloaded{
          [p](const NormalJumps& j) {
            const double m = j.mean, s2 = j.sd * j.sd;
            switch (p) {
              case 1: return m;
              case 2: return m * m + s2;
              case 3: return m * m * m + 3.0 * m * s2;
              default: return m * m * m * m + 6.0 * m * m * s2 + 3.0 * s2 * s2;
            }
          },
          [p](const ExponentialJumps& j) { return std::tgamma(p + 1.0) / std::pow(j.rate, p); },
          [p](const UniformJumps& j) {
            return (std::pow(j.hi, p + 1) - std::pow(j.lo, p + 1)) / ((p + 1) * (j.hi - j.lo));
          },
          [p](const DiscreteJumps& j) {
            const double total = std::accumulate(j.probs.begin(), j.probs.end(), 0.0);
            double acc = 0.0;
            for (std::size_t i = 0; i < j.values.size(); ++i)
              acc += j.probs[i] * std::pow(j.values[i], p);
            return acc / total;
          },
      },
      law);
}

double jump_law_abs_tail(const JumpLaw& law, double y) {
  return std::visit(
      Overloaded{
          [y](const NormalJumps& j) {
            if (j.sd == 0.0) return std::abs(j.mean) > y ? 1.0 : 0.0;
            return normal_cdf(-(y - j.mean) / j.sd) + normal_cdf((-y - j.mean) / j.sd);
          },
          [y](const ExponentialJumps& j) { return std::exp(-j.rate * y); },
          [y](const UniformJumps& j) {
            const double upper = std::max(0.0, j.hi - std::max(j.lo, y));
            const double lower = std::max(0.0, std::min(j.hi, -y) - j.lo);
            return (upper + lower) / (j.hi - j.lo);
          },
          [y](const DiscreteJumps& j) {
            const double total = std::accumulate(j.probs.begin(), j.probs.end(), 0.0);
            double acc = 0.0;
            for (std::size_t i = 0; i < j.values.size(); ++i)
              if (std::abs(j.values[i]) > y) acc += j.probs[i];
            return acc / total;
          },
      },
      law);
}

// ---------------------------------------------------------------------------

std::optional<int> FinePath::dyadic_exponent() const {
  const std::size_t n = cells();
  if (n == 0 || (n & (n - 1)) != 0) return std::nullopt;
  return std::countr_zero(n);
}

std::size_t dyadic_cells(int q) {
  require(q >= 1, "dyadic resolution q must be >= 1");
  require(q <= 30, "dyadic resolution q must be <= 30");
  return std::size_t{1} << q;
}

std::vector<double> increments_on_grid(const FinePath& path, std::size_t k) {
  const std::size_t n = path.cells();
  require(k >= 1 && n > 0 && n % k == 0, "cell count k must divide the fine grid size");
  const std::size_t step = n / k;
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = path.values[(i + 1) * step] - path.values[i * step];
  return out;
}

// ---------------------------------------------------------------------------

double JumpComponent::draw(RngStream& rng) const {
  return std::visit(
      Overloaded{
          [&rng](const PowerLawJumps& s) {
            const double sign = rng.uniform() < s.p_pos ? 1.0 : -1.0;
            const double u = rng.uniform();
            const double lo_a = std::pow(s.lo, -s.alpha);
            const double hi_a = std::pow(s.hi, -s.alpha);
            return sign * std::pow(lo_a - u * (lo_a - hi_a), -1.0 / s.alpha);
          },
          [&rng](const LawJumps& s) { return jump_law_quantile(s.law, rng.uniform()); },
          [&rng](const GammaAnnulusJumps& s) {
            // Log-uniform proposal on (lo, hi], accepted with prob e^{-b(x - lo)}.
            const double log_ratio = std::log(s.hi / s.lo);
            for (;;) {
              const double x = s.lo * std::exp(rng.uniform() * log_ratio);
              if (rng.uniform() <= std::exp(-s.b * (x - s.lo))) return x;
            }
          },
      },
      sampler);
}

double JumpComponent::abs_tail(double y) const {
  const double raw = y / scale;
  return std::visit(Overloaded{
                        [raw](const PowerLawJumps& s) {
                          if (raw < s.lo) return 1.0;
                          if (raw >= s.hi) return 0.0;
                          const double hi_a = std::pow(s.hi, -s.alpha);
                          return (std::pow(raw, -s.alpha) - hi_a) / (std::pow(s.lo, -s.alpha) - hi_a);
                        },
                        [raw](const LawJumps& s) { return jump_law_abs_tail(s.law, raw); },
                        [raw](const GammaAnnulusJumps& s) {
                          if (raw < s.lo) return 1.0;
                          if (raw >= s.hi) return 0.0;
                          return (e1(s.b * raw) - e1(s.b * s.hi)) / (e1(s.b * s.lo) - e1(s.b * s.hi));
                        },
                    },
                    sampler);
}

LevyProcess LevyProcess::scaled(double c) const {
  LevyProcess out = *this;
  for (auto& j : out.jumps) j.scale *= c;
  for (auto& g : out.gammas) g.scale *= c;
  out.brownian_sd *= std::abs(c);
  return out;
}

void LevyProcess::absorb(const LevyProcess& other) {
  jumps.insert(jumps.end(), other.jumps.begin(), other.jumps.end());
  gammas.insert(gammas.end(), other.gammas.begin(), other.gammas.end());
  brownian_sd = std::hypot(brownian_sd, other.brownian_sd);
}

double LevyProcess::expected_jumps() const {
  double total = 0.0;
  for (const auto& j : jumps) total += j.rate;
  return total;
}

double LevyProcess::jump_variance() const {
  double v = 0.0;
  for (const auto& j : jumps) v += j.rate * j.scale * j.scale * j.m2;
  for (const auto& g : gammas) v += g.shape * g.scale * g.scale / (g.rate * g.rate);
  return v;
}

double LevyProcess::variance() const { return jump_variance() + brownian_sd * brownian_sd; }

double LevyProcess::mu4() const {
  double v = 0.0;
  for (const auto& j : jumps) v += j.rate * std::pow(j.scale, 4) * j.m4;
  for (const auto& g : gammas) v += 6.0 * g.shape * std::pow(g.scale / g.rate, 4);
  return v;
}

double LevyProcess::tail(double x) const {
  if (!(x > 0.0)) return expected_jumps() + (gammas.empty() ? 0.0 : std::numeric_limits<double>::infinity());
  double total = 0.0;
  for (const auto& j : jumps) total += j.rate * j.abs_tail(x);
  for (const auto& g : gammas) total += g.shape * e1(g.rate * x / g.scale);
  return total;
}

FinePath LevyProcess::sample_path(std::size_t cells, RngStream& rng, const SamplingLimits& limits,
                                  std::size_t* jumps_drawn) const {
  require(cells >= 1, "grid needs at least one cell");
  if (expected_jumps() > limits.max_expected_jumps)
    throw NumericalGuard("expected jump count " + std::to_string(expected_jumps()) +
                         " exceeds the configured maximum");
  FinePath path(cells);
  auto& v = path.values;
  const double n = static_cast<double>(cells);
  std::size_t drawn = 0;
  std::vector<double> times;
  std::vector<double> prefix;
  for (const auto& comp : jumps) {
    const std::uint64_t count = rng.poisson(comp.rate);
    drawn += count;
    times.resize(count);
    for (auto& t : times) t = rng.uniform();
    std::sort(times.begin(), times.end());
    prefix.assign(count + 1, 0.0);
    for (std::uint64_t i = 0; i < count; ++i) prefix[i + 1] = prefix[i] + comp.draw(rng);
    const double drift = comp.drift();
    std::size_t seen = 0;
    for (std::size_t j = 0; j <= cells; ++j) {
      const double t = static_cast<double>(j) / n;
      while (seen < count && times[seen] <= t) ++seen;
      v[j] += comp.scale * prefix[seen] - drift * t;
    }
  }
  if (brownian_sd > 0.0) {
    const double sd = brownian_sd * std::sqrt(1.0 / n);
    double b = 0.0;
    for (std::size_t j = 1; j <= cells; ++j) {
      b += sd * rng.normal();
      v[j] += b;
    }
  }
  for (const auto& g : gammas) {
    const double dt = 1.0 / n;
    double acc = 0.0;
    for (std::size_t j = 1; j <= cells; ++j) {
      acc += rng.gamma(g.shape * dt, 1.0 / g.rate);
      const double t = static_cast<double>(j) / n;
      v[j] += g.scale * (acc - g.shape / g.rate * t);
    }
  }
  for (double x : v)
    if (!std::isfinite(x)) throw NumericalGuard("non-finite value in sampled path");
  if (jumps_drawn) *jumps_drawn = drawn;
  return path;
}

double LevyProcess::sample_at(double t, RngStream& rng, const SamplingLimits& limits) const {
  require(t >= 0.0, "time must be >= 0");
  if (expected_jumps() * t > limits.max_expected_jumps)
    throw NumericalGuard("expected jump count exceeds the configured maximum");
  double x = 0.0;
  for (const auto& comp : jumps) {
    const std::uint64_t count = rng.poisson(comp.rate * t);
    double sum = 0.0;
    for (std::uint64_t i = 0; i < count; ++i) sum += comp.draw(rng);
    x += comp.scale * sum - comp.drift() * t;
  }
  if (brownian_sd > 0.0) x += brownian_sd * std::sqrt(t) * rng.normal();
  for (const auto& g : gammas) {
    if (t > 0.0) x += g.scale * (rng.gamma(g.shape * t, 1.0 / g.rate) - g.shape / g.rate * t);
  }
  return x;
}

// ---------------------------------------------------------------------------

LevyProcess raw_annulus(const LevyModelSpec& base, double lo, double hi) {
  require(lo >= 0.0 && lo < hi, "annulus needs 0 <= lo < hi");
  return std::visit(
      Overloaded{
          [&](const TruncatedStable& m) {
            LevyProcess p;
            const double a = std::max(lo, m.eps_lo);
            const double b = std::min(hi, m.eps_hi);
            if (a < b) p.jumps.push_back(power_law_component(m.alpha, m.c_neg, m.c_pos, a, b));
            return p;
          },
          [&](const GammaMartingale& m) {
            require(lo > 0.0, "gamma annulus needs a positive inner threshold");
            require(std::isfinite(hi), "gamma annulus needs a finite outer threshold");
            LevyProcess p;
            p.jumps.push_back(gamma_annulus_component(m.shape, m.rate, lo, hi));
            return p;
          },
          [&](const SmallJumpAnnulus& m) {
            require(m.base != nullptr, "annulus model needs a base model");
            const double a = std::max(lo, m.eps_lo);
            const double b = std::min(hi, m.eps_hi);
            if (!(a < b)) return LevyProcess{};
            return raw_annulus(*m.base, a, b);
          },
          [](const auto&) -> LevyProcess {
            throw InvalidArgument(
                "jump annulus is defined for truncated-stable, gamma and annulus base models");
          },
      },
      base.variant);
}

double raw_annulus_variance(const LevyModelSpec& base, double lo, double hi) {
  if (!(lo < hi)) return 0.0;
  return raw_annulus(base, lo, hi).jump_variance();
}

LevyModel::LevyModel(LevyModelSpec spec) : spec_(std::move(spec)) {
  Compiled c = compile(spec_);
  process_ = std::move(c.process);
  moments_.mu4 = process_.mu4();
  moments_.sigma2 = c.sigma2;
  moments_.jump_rate =
      process_.gammas.empty() ? process_.expected_jumps() : std::numeric_limits<double>::infinity();
  moments_.tail = [p = process_](double x) { return p.tail(x); };
}

FinePath sample_fine_path(const LevyModel& model, int q, RngStream& rng, const SamplingLimits& limits) {
  return model.process().sample_path(dyadic_cells(q), rng, limits);
}

FinePath sample_path_on_grid(const LevyModel& model, std::size_t cells, RngStream& rng,
                             const SamplingLimits& limits) {
  return model.process().sample_path(cells, rng, limits);
}

double sample_endpoint(const LevyModel& model, RngStream& rng) {
  return model.process().sample_at(1.0, rng);
}

double sample_at(const LevyModel& model, double t, RngStream& rng) {
  return model.process().sample_at(t, rng);
}

const ModelMoments& model_moments(const LevyModel& model) { return model.moments(); }

}  // namespace levycouple
