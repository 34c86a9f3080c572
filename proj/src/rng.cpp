#include "rng.hpp"

#include <bit>

namespace levycouple {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed) : key_(seed) {
  std::uint64_t sm = seed;
  for (auto& w : s_) w = splitmix64(sm);
}

RngStream RngStream::split(std::uint64_t child_id) const {
  std::uint64_t a = key_ ^ 0xD1B54A32D192ED03ULL;
  std::uint64_t b = child_id;
  std::uint64_t mixed = splitmix64(a) ^ std::rotl(splitmix64(b), 17);
  std::uint64_t m = mixed;
  return RngStream(splitmix64(m));
}

RngStream::result_type RngStream::operator()() {
  const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = std::rotl(s_[3], 45);
  return result;
}

double RngStream::uniform() {
  // 53 random bits, shifted off zero by half an ulp.
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return normal_(*this); }

std::uint64_t RngStream::poisson(double mean) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<std::uint64_t> d(mean);
  return d(*this);
}

double RngStream::gamma(double shape, double scale) {
  std::gamma_distribution<double> d(shape, scale);
  return d(*this);
}

}  // namespace levycouple
