#pragma once

#include <string>
#include <string_view>

#include "levy_models.hpp"

namespace levycouple {

// Text form of a model, used by the CLI and config files.
//
//   truncated-stable(alpha, c_neg, c_pos, eps_lo, eps_hi)
//   exp-stable(eps1, eps2)          alpha 1.5, weights 0.4/0.6, jumps in (eps2, eps1)
//   stable-base                     truncated-stable(1.5, 0.4, 0.6, 2^-40, 1)
//   annulus(n)                      small-jumps(stable-base, 2^-n-1, 2^-n)
//   small-jumps(base, lo, hi)
//   perturbed(eps[, inner])         inner defaults to exp-stable(0.1, 0.03)
//   gamma(shape, rate), fig1-gamma  gamma(1, 1)
//   cpp(rate, law), cpp-raw(rate, law)
//       law: normal(m, s) | exponential(r) | uniform(a, b) | discrete(v1, p1, v2, p2, ...)
//   cpp-atoms(rate)                 cpp(rate, discrete(-1, 0.5, 1, 0.5))
//   brownian
//   jitter(model, v)
//
// Numbers accept the form a^b, e.g. 2^-10.
SpecPtr parse_model(std::string_view text);

// Canonical form; parse_model(format_model(s)) == s.
std::string format_model(const LevyModelSpec& spec);

std::string format_number(double x);

}  // namespace levycouple
