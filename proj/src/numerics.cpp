#include "nsff/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace nsff {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw std::domain_error("gauss_legendre: n must be positive");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Newton iteration from the Chebyshev-based root estimate.
        double z = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::fabs(dz) < 1e-15) break;
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
}

double gauss_legendre_integrate(const std::function<double(double)>& f, double a, double b,
                                int n) {
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += w[i] * f(mid + half * x[i]);
    return half * sum;
}

namespace {

PowerLawFit fit_core(const std::vector<double>& lr, const std::vector<double>& lv) {
    int n = static_cast<int>(lr.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += lr[i];
        sy += lv[i];
        sxx += lr[i] * lr[i];
        sxy += lr[i] * lv[i];
    }
    double denom = n * sxx - sx * sx;
    PowerLawFit fit;
    fit.points_used = n;
    fit.exponent = (n * sxy - sx * sy) / denom;
    fit.log_amplitude = (sy - fit.exponent * sx) / n;
    for (int i = 0; i < n; ++i) {
        double res = std::fabs(lv[i] - (fit.log_amplitude + fit.exponent * lr[i]));
        if (res > fit.max_residual) fit.max_residual = res;
    }
    return fit;
}

}  // namespace

PowerLawFit fit_power_law(const std::vector<double>& r, const std::vector<double>& values,
                          double floor) {
    if (r.size() != values.size()) throw std::invalid_argument("fit_power_law: size mismatch");
    std::vector<double> lr, lv;
    for (size_t i = 0; i < r.size(); ++i) {
        double v = std::fabs(values[i]);
        if (r[i] <= 0.0 || v <= floor) continue;
        lr.push_back(std::log(r[i]));
        lv.push_back(std::log(v));
    }
    if (lr.size() < 3) throw std::runtime_error("fit_power_law: fewer than 3 usable points");
    PowerLawFit fit = fit_core(lr, lv);
    for (size_t drop = 0; drop < lr.size(); ++drop) {
        std::vector<double> lr2, lv2;
        for (size_t i = 0; i < lr.size(); ++i) {
            if (i == drop) continue;
            lr2.push_back(lr[i]);
            lv2.push_back(lv[i]);
        }
        double dev = std::fabs(fit_core(lr2, lv2).exponent - fit.exponent);
        if (dev > fit.jackknife_spread) fit.jackknife_spread = dev;
    }
    return fit;
}

}  // namespace nsff
