#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "levy_models.hpp"
#include "rng.hpp"

namespace levycouple {

// A distribution function seen through the two queries the comonotone map
// needs: F(x-) and the atom P(X = x).
class DistributionFunction {
 public:
  virtual ~DistributionFunction() = default;
  virtual double cdf_left(double x) const = 0;
  virtual double atom(double x) const = 0;
};

class EmpiricalCdf final : public DistributionFunction {
 public:
  explicit EmpiricalCdf(std::vector<double> samples);

  double cdf_left(double x) const override;
  double atom(double x) const override;
  // Smallest sample whose rank is at least ceil(u n).
  double quantile(double u) const;

  std::size_t size() const { return sorted_.size(); }
  std::span<const double> sorted_samples() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

// Continuous, strictly increasing version of the empirical distribution.
// Near-equal samples (relative tolerance) are merged into one value; a value
// seen once sits at mid-rank, a repeated value keeps a jump of (count-1)/n.
// Between values the function is linear, beyond the extremes it decays
// exponentially with the sample standard deviation as scale.
class InterpolatedCdf final : public DistributionFunction {
 public:
  explicit InterpolatedCdf(std::vector<double> samples, double tie_tolerance = 1e-12);

  double cdf_left(double x) const override;
  double atom(double x) const override;

  std::span<const double> values() const { return values_; }

 private:
  std::size_t locate(double x, bool* on_value) const;

  double tol_;
  double tau_;
  std::vector<double> values_;
  std::vector<double> left_;
  std::vector<double> right_;
};

class NormalCdf final : public DistributionFunction {
 public:
  explicit NormalCdf(double sd = 1.0);
  double cdf_left(double x) const override;
  double atom(double) const override { return 0.0; }

 private:
  double sd_;
};

// (G - a) / sqrt(a) with G ~ Gamma(a, 1): the law of the standardised gamma
// martingale at t = 1.
class StandardGammaCdf final : public DistributionFunction {
 public:
  explicit StandardGammaCdf(double shape);
  double cdf_left(double x) const override;
  double atom(double) const override { return 0.0; }

 private:
  double shape_;
};

using CdfPtr = std::shared_ptr<const DistributionFunction>;

// m independent draws of X(t); draw i uses rng.split(i).
std::vector<double> sample_marginal(const LevyModel& model, double t, std::size_t m,
                                    const RngStream& rng);

std::shared_ptr<const EmpiricalCdf> endpoint_cdf(const LevyModel& model, std::size_t m,
                                                 const RngStream& rng);

// Snaps numerically tied values together: after sorting, a value within
// tolerance * max(1, |v|) of its predecessor takes the predecessor's value.
std::vector<double> snap_ties(std::span<const double> xs, double tolerance = 1e-12);

}  // namespace levycouple
