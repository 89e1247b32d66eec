#include "nsff/specfun.hpp"

#include <cmath>
#include <stdexcept>

// Incomplete gamma by power series below x = a+1 and by Lentz's continued
// fraction above it. Both converge fast there and the switch point keeps each
// evaluation in its well-conditioned regime.

namespace nsff {

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = 1e-16;
constexpr double kTinyPivot = 1e-300;

// gamma(a,x) * exp(x - a*log(x)), i.e. the series sum_{n>=0} x^n / (a (a+1) ... (a+n)).
double lower_series(double a, double x) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps) return sum;
    }
    throw std::runtime_error("lower_gamma: series did not converge");
}

// Gamma(a,x) * exp(x - a*log(x)) as the continued fraction
// 1/(x+1-a - 1*(1-a)/(x+3-a - 2*(2-a)/(x+5-a - ...))), evaluated by
// the modified Lentz recurrence.
double upper_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTinyPivot;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTinyPivot) d = kTinyPivot;
        c = b + an / c;
        if (std::fabs(c) < kTinyPivot) c = kTinyPivot;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) return h;
    }
    throw std::runtime_error("upper_gamma: continued fraction did not converge");
}

double prefactor(double a, double x) { return std::exp(a * std::log(x) - x); }

}  // namespace

double lower_gamma(double a, double x) {
    if (a <= 0.0) throw std::domain_error("lower_gamma: a must be positive");
    if (x < 0.0) throw std::domain_error("lower_gamma: x must be nonnegative");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return prefactor(a, x) * lower_series(a, x);
    return std::tgamma(a) - prefactor(a, x) * upper_cf(a, x);
}

double upper_gamma(double a, double x) {
    if (a <= 0.0) throw std::domain_error("upper_gamma: a must be positive");
    if (x < 0.0) throw std::domain_error("upper_gamma: x must be nonnegative");
    if (x == 0.0) return std::tgamma(a);
    if (x < a + 1.0) return std::tgamma(a) - prefactor(a, x) * lower_series(a, x);
    return prefactor(a, x) * upper_cf(a, x);
}

double regularized_gamma_p(double a, double x) { return lower_gamma(a, x) / std::tgamma(a); }

double gauss_power_head(int m, double A) {
    if (m < 0) throw std::domain_error("gauss_power_head: m must be nonnegative");
    if (A < 0.0) throw std::domain_error("gauss_power_head: A must be nonnegative");
    return 0.5 * lower_gamma(0.5 * (m + 1), A * A);
}

double gauss_power_tail(int m, double A) {
    if (m < 0) throw std::domain_error("gauss_power_tail: m must be nonnegative");
    if (A < 0.0) throw std::domain_error("gauss_power_tail: A must be nonnegative");
    return 0.5 * upper_gamma(0.5 * (m + 1), A * A);
}

}  // namespace nsff
