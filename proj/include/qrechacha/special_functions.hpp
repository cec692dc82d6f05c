#pragma once

namespace qrechacha {

/// Complementary error function.
double erfc(double x);

/// Regularized upper incomplete gamma Q(a, x). Throws Errc::domain for
/// a <= 0 or x < 0.
double igamc(double a, double x);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace qrechacha
