#include "nsff/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nsff/numerics.hpp"
#include "nsff/profile.hpp"
#include "nsff/specfun.hpp"

namespace nsff {

namespace {

void check_dim(int d) {
    if (d != 2 && d != 3) throw std::invalid_argument("kernels: dimension must be 2 or 3");
}

void check_index(const KernelIndex& idx, int d) {
    check_dim(d);
    if (idx.j < 0 || idx.j >= d || idx.h < 0 || idx.h >= d || idx.k < 0 || idx.k >= d)
        throw std::invalid_argument("kernels: component index out of range");
}

void check_time(double t) {
    if (!(t > 0.0)) throw std::domain_error("kernels: time must be positive");
}

// Order the symmetric pair so h <= k; keeps evaluation bitwise symmetric in (h, k).
KernelIndex canonical(const KernelIndex& idx) {
    KernelIndex c = idx;
    if (c.h > c.k) std::swap(c.h, c.k);
    return c;
}

}  // namespace

double gaussian(const Vec3& x, double t, int d) {
    check_dim(d);
    check_time(t);
    return std::pow(4.0 * pi * t, -0.5 * d) * std::exp(-0.25 * norm2(x, d) / t);
}

double eval_F1(const KernelIndex& idx, const Vec3& x, double t, int d) {
    check_index(idx, d);
    KernelIndex ix = canonical(idx);
    check_time(t);
    double delta_part = (ix.j == ix.k ? x[ix.h] : 0.0) + (ix.j == ix.h ? x[ix.k] : 0.0);
    double coeff = -0.25 * std::pow(4.0 * pi, -0.5 * d) * std::pow(t, -0.5 * (d + 2));
    return coeff * delta_part * std::exp(-0.25 * norm2(x, d) / t);
}

double eval_F2(const KernelIndex& idx, const Vec3& x, double t, int d) {
    check_index(idx, d);
    KernelIndex ix = canonical(idx);
    check_time(t);
    double r2 = norm2(x, d);
    if (r2 == 0.0) return 0.0;
    double r = std::sqrt(r2);
    double A = 0.5 * r / std::sqrt(t);
    double head1 = gauss_power_head(d + 1, A);
    double head2 = gauss_power_head(d + 3, A);
    double sig = sigma_jhk(ix.j, ix.h, ix.k, x);
    double xxx = x[ix.j] * x[ix.h] * x[ix.k];
    return 2.0 * std::pow(pi, -0.5 * d) *
           (sig / std::pow(r, d + 2) * head1 - 2.0 * xxx / std::pow(r, d + 4) * head2);
}

double leading_term(const KernelIndex& idx, const Vec3& x, int d) {
    check_index(idx, d);
    KernelIndex ix = canonical(idx);
    double r2 = norm2(x, d);
    if (r2 == 0.0) throw std::domain_error("leading_term: undefined at x = 0");
    double r = std::sqrt(r2);
    double sig = sigma_jhk(ix.j, ix.h, ix.k, x);
    double xxx = x[ix.j] * x[ix.h] * x[ix.k];
    return gamma_const(d) * (sig / std::pow(r, d + 2) - (d + 2) * xxx / std::pow(r, d + 4));
}

double eval_Psi(const KernelIndex& idx, const Vec3& y, int d) {
    check_index(idx, d);
    KernelIndex ix = canonical(idx);
    double r2 = norm2(y, d);
    if (r2 == 0.0) throw std::domain_error("eval_Psi: undefined at y = 0");
    double r = std::sqrt(r2);
    double delta_part = (ix.j == ix.k ? y[ix.h] : 0.0) + (ix.j == ix.h ? y[ix.k] : 0.0);
    double psi1 = -std::pow(2.0, -(d + 2)) * std::pow(pi, -0.5 * d) * delta_part *
                  std::pow(r, d + 1) * std::exp(-0.25 * r2);
    double tail1 = gauss_power_tail(d + 1, 0.5 * r);
    double tail2 = gauss_power_tail(d + 3, 0.5 * r);
    double sig = sigma_jhk(ix.j, ix.h, ix.k, y);
    double yyy = y[ix.j] * y[ix.h] * y[ix.k];
    double psi2 =
        2.0 * std::pow(pi, -0.5 * d) * (-sig / r * tail1 + 2.0 * yyy / (r * r2) * tail2);
    return psi1 + psi2;
}

KernelValue eval_F(const KernelIndex& idx, const Vec3& x, double t, int d) {
    check_index(idx, d);
    check_time(t);
    KernelValue v;
    if (norm2(x, d) == 0.0) return v;
    v.part1 = eval_F1(idx, x, t, d);
    v.part2 = eval_F2(idx, x, t, d);
    v.total = v.part1 + v.part2;
    v.leading = leading_term(idx, x, d);
    v.psi = eval_Psi(idx, scaled(x, 1.0 / std::sqrt(t)), d);
    return v;
}

double check_gshift(const KernelIndex& idx, double t, const GridSpec& grid) {
    grid.validate();
    check_index(idx, grid.d);
    check_time(t);
    if (grid.L < 8.0 * std::sqrt(t + 1.0) || grid.dx() > 0.25 * std::sqrt(t))
        throw std::domain_error("check_gshift: grid cannot resolve the kernel at this time");

    const int d = grid.d;
    ScalarField f(grid);
    if (d == 2) {
        for (int i = 0; i < grid.n; ++i)
            for (int j = 0; j < grid.n; ++j)
                f.at(i, j) = eval_F(idx, {grid.coord(i), grid.coord(j), 0.0}, t, d).total;
    } else {
        for (int i = 0; i < grid.n; ++i)
            for (int j = 0; j < grid.n; ++j)
                for (int k = 0; k < grid.n; ++k)
                    f.at(i, j, k) =
                        eval_F(idx, {grid.coord(i), grid.coord(j), grid.coord(k)}, t, d).total;
    }

    ScalarField conv =
        convolve_sampled(f, [d](const Vec3& z) { return gaussian(z, 1.0, d); });

    // Compare inside |x| <= L/2; nearer the box edge the truncated far tail of F
    // contributes to the discrete convolution at a visible level.
    double window = 0.5 * grid.L;
    double worst = 0.0;
    if (d == 2) {
        for (int i = 0; i < grid.n; ++i)
            for (int j = 0; j < grid.n; ++j) {
                Vec3 x{grid.coord(i), grid.coord(j), 0.0};
                if (norm2(x, d) > window * window) continue;
                double ref = eval_F(idx, x, t + 1.0, d).total;
                worst = std::max(worst, std::fabs(conv.at(i, j) - ref));
            }
    } else {
        for (int i = 0; i < grid.n; ++i)
            for (int j = 0; j < grid.n; ++j)
                for (int k = 0; k < grid.n; ++k) {
                    Vec3 x{grid.coord(i), grid.coord(j), grid.coord(k)};
                    if (norm2(x, d) > window * window) continue;
                    double ref = eval_F(idx, x, t + 1.0, d).total;
                    worst = std::max(worst, std::fabs(conv.at(i, j, k) - ref));
                }
    }
    return worst;
}

namespace {

// Shared radial machinery for the L1 norm: per direction, integrate |F(r w, t)| r^{d-1} dr
// over sign-constant segments of panels scaled by sqrt(t), then add the analytic tail of
// the homogeneous leading term beyond R = 20 sqrt(t).
struct RadialRule {
    std::vector<double> nodes, weights;  // Gauss-Legendre on [-1, 1]
};

double radial_l1(const KernelIndex& idx, const Vec3& w, double t, int d, int nscan,
                 const RadialRule& rule) {
    static const double edges[] = {0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 20.0};
    const int npanel = 10;
    const double s = std::sqrt(t);
    auto fval = [&](double r) { return eval_F(idx, scaled(w, r), t, d).total; };

    double total = 0.0;
    for (int p = 0; p < npanel; ++p) {
        double a = edges[p] * s, b = edges[p + 1] * s;
        // Locate sign changes on a uniform scan, refine by bisection.
        std::vector<double> cuts{a};
        double prev_r = a, prev_f = fval(a);
        for (int i = 1; i <= nscan; ++i) {
            double r = a + (b - a) * i / nscan;
            double fr = fval(r);
            if (prev_f * fr < 0.0) {
                double lo = prev_r, hi = r, flo = prev_f;
                for (int it = 0; it < 60; ++it) {
                    double mid = 0.5 * (lo + hi);
                    double fm = fval(mid);
                    if (flo * fm <= 0.0)
                        hi = mid;
                    else {
                        lo = mid;
                        flo = fm;
                    }
                }
                cuts.push_back(0.5 * (lo + hi));
            }
            prev_r = r;
            prev_f = fr;
        }
        cuts.push_back(b);
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            double mid = 0.5 * (cuts[c] + cuts[c + 1]);
            double half = 0.5 * (cuts[c + 1] - cuts[c]);
            if (half <= 0.0) continue;
            double seg = 0.0;
            for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                double r = mid + half * rule.nodes[q];
                seg += rule.weights[q] * std::fabs(fval(r)) * std::pow(r, d - 1);
            }
            total += seg * half;
        }
    }
    // Beyond R the kernel is the homogeneous term up to an exponentially dead remainder:
    // integral of |lead(w)| r^{-(d+1)} r^{d-1} dr from R to infinity is |lead(w)| / R.
    total += std::fabs(leading_term(idx, w, d)) / (20.0 * s);
    return total;
}

std::vector<KernelIndex> component_list(int d) {
    std::vector<KernelIndex> out;
    for (int j = 0; j < d; ++j)
        for (int h = 0; h < d; ++h)
            for (int k = h; k < d; ++k) out.push_back({j, h, k});
    return out;
}

}  // namespace

double kernel_l1_norm(double t, int d) {
    check_dim(d);
    check_time(t);
    RadialRule rule;
    double sum = 0.0;
    if (d == 2) {
        gauss_legendre(20, rule.nodes, rule.weights);
        const int ntheta = 512;  // half circle; |F| is antipode symmetric
        for (const KernelIndex& idx : component_list(2)) {
            double acc = 0.0;
            for (int a = 0; a < ntheta; ++a) {
                double th = (a + 0.5) * pi / ntheta;
                Vec3 w{std::cos(th), std::sin(th), 0.0};
                acc += radial_l1(idx, w, t, 2, 32, rule);
            }
            sum += acc * (2.0 * pi / ntheta);
        }
    } else {
        gauss_legendre(12, rule.nodes, rule.weights);
        std::vector<double> un, uw;
        gauss_legendre(16, un, uw);  // u = cos(polar angle)
        const int nphi = 32;
        for (const KernelIndex& idx : component_list(3)) {
            double acc = 0.0;
            for (std::size_t iu = 0; iu < un.size(); ++iu) {
                double u = un[iu];
                double rho = std::sqrt(std::max(0.0, 1.0 - u * u));
                for (int a = 0; a < nphi; ++a) {
                    double ph = (a + 0.5) * 2.0 * pi / nphi;
                    Vec3 w{rho * std::cos(ph), rho * std::sin(ph), u};
                    acc += uw[iu] * radial_l1(idx, w, t, 3, 16, rule);
                }
            }
            sum += acc * (2.0 * pi / nphi);
        }
    }
    return sum;
}

std::vector<std::pair<double, double>> l1_norm_scaling(const std::vector<double>& times, int d) {
    check_dim(d);
    std::vector<std::pair<double, double>> out;
    out.reserve(times.size());
    for (double t : times) out.emplace_back(t, kernel_l1_norm(t, d) * std::sqrt(t));
    return out;
}

double divergence_symbol_residual(int n, int d) {
    check_dim(d);
    if (n < 2) throw std::invalid_argument("divergence_symbol_residual: lattice too small");
    double worst = 0.0;
    auto probe = [&](const Vec3& xi) {
        double q2 = norm2(xi, d);
        if (q2 == 0.0) return;
        for (int h = 0; h < d; ++h)
            for (int k = h; k < d; ++k) {
                double contract = 0.0;
                for (int j = 0; j < d; ++j) {
                    double m = 0.5 * ((j == k ? xi[h] : 0.0) + (j == h ? xi[k] : 0.0)) -
                               xi[j] * xi[h] * xi[k] / q2;
                    contract += xi[j] * m;
                }
                worst = std::max(worst, std::fabs(contract) / q2);
            }
    };
    int lo = -n / 2, hi = n / 2;
    if (d == 2) {
        for (int a = lo; a < hi; ++a)
            for (int b = lo; b < hi; ++b) probe({double(a), double(b), 0.0});
    } else {
        for (int a = lo; a < hi; ++a)
            for (int b = lo; b < hi; ++b)
                for (int c = lo; c < hi; ++c) probe({double(a), double(b), double(c)});
    }
    return worst;
}

}  // namespace nsff
