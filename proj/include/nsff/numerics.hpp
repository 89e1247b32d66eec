#pragma once

#include <functional>
#include <vector>

namespace nsff {

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Gauss-Legendre integral of f over [a, b] with n nodes.
double gauss_legendre_integrate(const std::function<double(double)>& f, double a, double b, int n);

/// Log-log least squares fit of |values| against abscissas.
struct PowerLawFit {
    double exponent = 0.0;       // slope of log|v| vs log r
    double log_amplitude = 0.0;  // intercept
    double max_residual = 0.0;   // max |log|v| - fit| over the points used
    double jackknife_spread = 0.0;  // max |exponent - leave-one-out exponent|
    int points_used = 0;
};

/// Fit |values(i)| ~ A * r(i)^s, skipping values below floor. Needs >= 3 usable points.
PowerLawFit fit_power_law(const std::vector<double>& r, const std::vector<double>& values,
                          double floor = 0.0);

}  // namespace nsff
