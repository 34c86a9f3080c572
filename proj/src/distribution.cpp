#include "distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "errors.hpp"
#include "normal.hpp"
#include "parallel.hpp"

namespace levycouple {

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples)) {
  require(!sorted_.empty(), "empirical distribution needs at least one sample");
  for (double x : sorted_) require(std::isfinite(x), "empirical distribution samples must be finite");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::cdf_left(double x) const {
  const auto it = std::lower_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalCdf::atom(double x) const {
  const auto [lo, hi] = std::equal_range(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(hi - lo) / static_cast<double>(sorted_.size());
}

double EmpiricalCdf::quantile(double u) const {
  require(u > 0.0 && u <= 1.0, "quantile level must lie in (0, 1]");
  const double n = static_cast<double>(sorted_.size());
  auto rank = static_cast<std::size_t>(std::ceil(u * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted_.size());
  return sorted_[rank - 1];
}

// ---------------------------------------------------------------------------

InterpolatedCdf::InterpolatedCdf(std::vector<double> samples, double tie_tolerance)
    : tol_(tie_tolerance) {
  require(samples.size() >= 2, "interpolated distribution needs at least two samples");
  for (double x : samples) require(std::isfinite(x), "distribution samples must be finite");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());

  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  tau_ = std::sqrt(ss / (n - 1.0));
  if (!(tau_ > 0.0)) tau_ = 1.0;

  std::vector<std::size_t> counts;
  for (double x : samples) {
    if (!values_.empty() && std::abs(x - values_.back()) <= tol_ * std::max(1.0, std::abs(values_.back()))) {
      ++counts.back();
    } else {
      values_.push_back(x);
      counts.push_back(1);
    }
  }
  double before = 0.0;
  for (std::size_t c : counts) {
    const double after = before + static_cast<double>(c);
    const double l = (before + 0.5) / n;
    left_.push_back(l);
    right_.push_back(c >= 2 ? (after - 0.5) / n : l);
    before = after;
  }
}

std::size_t InterpolatedCdf::locate(double x, bool* on_value) const {
  // Index of the first value >= x - tolerance.
  const auto it = std::lower_bound(values_.begin(), values_.end(), x, [this](double v, double y) {
    return v < y && std::abs(v - y) > tol_ * std::max(1.0, std::abs(v));
  });
  const std::size_t j = static_cast<std::size_t>(it - values_.begin());
  *on_value = j < values_.size() && std::abs(values_[j] - x) <= tol_ * std::max(1.0, std::abs(values_[j]));
  return j;
}

double InterpolatedCdf::cdf_left(double x) const {
  bool on_value = false;
  const std::size_t j = locate(x, &on_value);
  if (on_value) return left_[j];
  if (j == 0) return left_.front() * std::exp((x - values_.front()) / tau_);
  if (j == values_.size()) return 1.0 - (1.0 - right_.back()) * std::exp(-(x - values_.back()) / tau_);
  const double a = values_[j - 1], b = values_[j];
  const double w = (x - a) / (b - a);
  return right_[j - 1] + w * (left_[j] - right_[j - 1]);
}

double InterpolatedCdf::atom(double x) const {
  bool on_value = false;
  const std::size_t j = locate(x, &on_value);
  return on_value ? right_[j] - left_[j] : 0.0;
}

// ---------------------------------------------------------------------------

NormalCdf::NormalCdf(double sd) : sd_(sd) { require(sd > 0.0 && std::isfinite(sd), "normal sd must be positive"); }

double NormalCdf::cdf_left(double x) const { return normal_cdf(x / sd_); }

StandardGammaCdf::StandardGammaCdf(double shape) : shape_(shape) {
  require(shape > 0.0 && std::isfinite(shape), "gamma shape must be positive");
}

double StandardGammaCdf::cdf_left(double x) const {
  const double g = shape_ + std::sqrt(shape_) * x;
  if (g <= 0.0) return 0.0;
  return boost::math::gamma_p(shape_, g);
}

// ---------------------------------------------------------------------------

std::vector<double> sample_marginal(const LevyModel& model, double t, std::size_t m,
                                    const RngStream& rng) {
  require(m >= 1, "need at least one draw");
  std::vector<double> out(m);
  parallel_for(m, [&](std::size_t i) {
    RngStream r = rng.split(i);
    out[i] = t == 1.0 ? sample_endpoint(model, r) : sample_at(model, t, r);
  });
  return out;
}

std::shared_ptr<const EmpiricalCdf> endpoint_cdf(const LevyModel& model, std::size_t m,
                                                 const RngStream& rng) {
  return std::make_shared<const EmpiricalCdf>(sample_marginal(model, 1.0, m, rng));
}

std::vector<double> snap_ties(std::span<const double> xs, double tolerance) {
  std::vector<double> out(xs.begin(), xs.end());
  std::vector<std::size_t> idx(xs.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  for (std::size_t r = 1; r < idx.size(); ++r) {
    const double prev = out[idx[r - 1]];
    if (std::abs(out[idx[r]] - prev) <= tolerance * std::max(1.0, std::abs(prev))) out[idx[r]] = prev;
  }
  return out;
}

}  // namespace levycouple
