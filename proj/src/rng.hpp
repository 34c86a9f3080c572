#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace levycouple {

// Splittable random stream: xoshiro256** state seeded from a 64-bit key via
// SplitMix64. Children are derived from the key (not the state), so a child's
// sequence depends only on (parent key, child id) and not on how many draws
// the parent has made.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed);

  RngStream split(std::uint64_t child_id) const;
  std::uint64_t key() const { return key_; }

  result_type operator()();
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  // Uniform on the open interval (0,1).
  double uniform();
  double normal();
  std::uint64_t poisson(double mean);
  double gamma(double shape, double scale);

 private:
  std::uint64_t key_;
  std::uint64_t s_[4];
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace levycouple
