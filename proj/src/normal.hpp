#pragma once

namespace levycouple {

double normal_cdf(double x);

// Standard normal quantile. Acklam's rational approximation followed by one
// Halley step against erfc; absolute error below 1e-9 on (1e-12, 1 - 1e-12),
// in practice near machine precision.
double normal_quantile(double p);

}  // namespace levycouple
