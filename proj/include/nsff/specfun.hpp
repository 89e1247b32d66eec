#pragma once

namespace nsff {

/// Lower incomplete gamma integral gamma(a,x) = int_0^x s^{a-1} e^{-s} ds, a > 0.
double lower_gamma(double a, double x);

/// Upper incomplete gamma integral Gamma(a,x) = int_x^inf s^{a-1} e^{-s} ds, a > 0.
double upper_gamma(double a, double x);

/// Regularized lower gamma P(a,x) = gamma(a,x) / Gamma(a).
double regularized_gamma_p(double a, double x);

/// Gaussian power moment head, int_0^A t^m e^{-t^2} dt (m >= 0, A >= 0).
double gauss_power_head(int m, double A);

/// Gaussian power moment tail, int_A^inf t^m e^{-t^2} dt (m >= 0, A >= 0).
double gauss_power_tail(int m, double A);

}  // namespace nsff
