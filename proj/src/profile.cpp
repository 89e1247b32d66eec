#include "nsff/profile.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace nsff {

SymMat::SymMat(int dim) : dim_(dim) {
    if (dim != 2 && dim != 3) throw std::domain_error("SymMat: dim must be 2 or 3");
    for (double& v : m_) v = 0.0;
}

SymMat SymMat::identity(int dim, double scale) {
    SymMat k(dim);
    for (int i = 0; i < dim; ++i) k.set(i, i, scale);
    return k;
}

SymMat SymMat::unit(int dim, int h, int k) {
    SymMat m(dim);
    m.set(h, k, 1.0);
    return m;
}

SymMat SymMat::from_rows(const std::vector<std::vector<double>>& rows, double tol) {
    int d = static_cast<int>(rows.size());
    SymMat k(d);
    for (int i = 0; i < d; ++i)
        if (static_cast<int>(rows[i].size()) != d)
            throw std::invalid_argument("SymMat::from_rows: ragged rows");
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            if (std::fabs(rows[i][j] - rows[j][i]) > tol)
                throw std::invalid_argument("SymMat::from_rows: matrix is not symmetric");
            k.set(i, j, rows[i][j]);
        }
    return k;
}

double SymMat::at(int h, int k) const { return m_[3 * h + k]; }

void SymMat::set(int h, int k, double v) {
    m_[3 * h + k] = v;
    m_[3 * k + h] = v;
}

void SymMat::add(int h, int k, double v) {
    if (h == k) {
        m_[3 * h + k] += v;
    } else {
        m_[3 * h + k] += v;
        m_[3 * k + h] += v;
    }
}

double SymMat::trace() const {
    double t = 0.0;
    for (int i = 0; i < dim_; ++i) t += at(i, i);
    return t;
}

double SymMat::max_abs() const {
    double t = 0.0;
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) t = std::max(t, std::fabs(at(i, j)));
    return t;
}

Vec3 SymMat::apply(const Vec3& x) const {
    Vec3 y{0.0, 0.0, 0.0};
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) y[i] += at(i, j) * x[j];
    return y;
}

double SymMat::quad(const Vec3& x) const { return dot(x, apply(x), dim_); }

SymMat& SymMat::axpy(double alpha, const SymMat& other) {
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j) set(i, j, at(i, j) + alpha * other.at(i, j));
    return *this;
}

SymMat SymMat::scaled(double alpha) const {
    SymMat r(dim_);
    r.axpy(alpha, *this);
    return r;
}

SymMat SymMat::minus(const SymMat& other) const {
    SymMat r = *this;
    r.axpy(-1.0, other);
    return r;
}

std::vector<double> SymMat::eigenvalues() const {
    if (dim_ == 2) {
        double a = at(0, 0), b = at(0, 1), c = at(1, 1);
        double mean = 0.5 * (a + c);
        double disc = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
        return {mean - disc, mean + disc};
    }
    // 3x3 symmetric eigenvalues by the trigonometric closed form.
    double a = at(0, 0), b = at(1, 1), c = at(2, 2);
    double d = at(0, 1), e = at(1, 2), f = at(0, 2);
    double p1 = d * d + e * e + f * f;
    if (p1 < 1e-300) {
        std::vector<double> ev{a, b, c};
        std::sort(ev.begin(), ev.end());
        return ev;
    }
    double q = (a + b + c) / 3.0;
    double p2 = (a - q) * (a - q) + (b - q) * (b - q) + (c - q) * (c - q) + 2.0 * p1;
    double p = std::sqrt(p2 / 6.0);
    // r = det((A - q I)/p) / 2, clamped into [-1,1] against roundoff.
    double m00 = (a - q) / p, m11 = (b - q) / p, m22 = (c - q) / p;
    double m01 = d / p, m12 = e / p, m02 = f / p;
    double detm = m00 * (m11 * m22 - m12 * m12) - m01 * (m01 * m22 - m12 * m02) +
                  m02 * (m01 * m12 - m11 * m02);
    double r = std::clamp(0.5 * detm, -1.0, 1.0);
    double phi = std::acos(r) / 3.0;
    double e1 = q + 2.0 * p * std::cos(phi);
    double e3 = q + 2.0 * p * std::cos(phi + 2.0 * pi / 3.0);
    double e2 = 3.0 * q - e1 - e3;
    std::vector<double> ev{e1, e2, e3};
    std::sort(ev.begin(), ev.end());
    return ev;
}

double gamma_const(int d) {
    if (d < 2) throw std::domain_error("gamma_const: d must be >= 2");
    return std::pow(pi, -0.5 * d) * std::tgamma(0.5 * (d + 2));
}

double sigma_jhk(int j, int h, int k, const Vec3& x) {
    double s = 0.0;
    if (j == h) s += x[k];
    if (j == k) s += x[h];
    if (h == k) s += x[j];
    return s;
}

double eval_Pi(const SymMat& K, const Vec3& x) {
    int d = K.dim();
    double r2 = norm2(x, d);
    if (r2 == 0.0) throw std::domain_error("eval_Pi: x must be nonzero");
    double rd = std::pow(r2, 0.5 * d);
    return gamma_const(d) * (K.trace() / (d * rd) - K.quad(x) / (rd * r2));
}

Vec3 eval_P(const SymMat& K, const Vec3& x) {
    int d = K.dim();
    double r2 = norm2(x, d);
    if (r2 == 0.0) throw std::domain_error("eval_P: x must be nonzero");
    double xKx = K.quad(x);
    Vec3 Kx = K.apply(x);
    double tr = K.trace();
    double g = gamma_const(d);
    Vec3 p{0.0, 0.0, 0.0};
    for (int j = 0; j < d; ++j)
        p[j] = g * ((d + 2) * x[j] * xKx - r2 * (tr * x[j] + 2.0 * Kx[j]));
    return p;
}

Vec3 eval_gradPi(const SymMat& K, const Vec3& x) {
    int d = K.dim();
    double r2 = norm2(x, d);
    if (r2 == 0.0) throw std::domain_error("eval_gradPi: x must be nonzero");
    double scale = std::pow(r2, -0.5 * (d + 4));
    return scaled(eval_P(K, x), scale);
}

double eval_Q(const SymMat& K, const Vec3& x, int j) {
    int d = K.dim();
    if (j < 0 || j >= d) throw std::domain_error("eval_Q: component out of range");
    return -eval_P(K, x)[j] / gamma_const(d);
}

SymMat dQj_form(const SymMat& K, int j) {
    int d = K.dim();
    if (j < 0 || j >= d) throw std::domain_error("dQj_form: component out of range");
    double tr = K.trace();
    SymMat M(d);
    // d_j Q_j for Q_j = |x|^2 (2 (Kx)_j + tr K x_j) - (d+2) x_j (x.Kx), as a quadratic form.
    // The dyad pair e_j k_j^T + k_j e_j^T lands on symmetric entries (j,l) once and (j,j) twice.
    for (int l = 0; l < d; ++l) {
        double v = -static_cast<double>(d) * K.at(j, l);
        M.add(j, l, (l == j) ? 2.0 * v : v);
    }
    M.add(j, j, 2.0 * tr);
    for (int l = 0; l < d; ++l) M.add(l, l, 2.0 * K.at(j, j) + tr);
    M.axpy(-(d + 2.0), K);
    return M;
}

bool is_isotropic(const SymMat& K, double rel_tol) {
    double tol = std::max(rel_tol, 1e-12) * std::max(1.0, K.max_abs());
    double mean = K.trace() / K.dim();
    for (int i = 0; i < K.dim(); ++i)
        for (int j = 0; j < K.dim(); ++j) {
            double target = (i == j) ? mean : 0.0;
            if (std::fabs(K.at(i, j) - target) > tol) return false;
        }
    return true;
}

namespace {

double circle_Q(const SymMat& K, int j, double theta) {
    Vec3 w{std::cos(theta), std::sin(theta), 0.0};
    return eval_Q(K, w, j);
}

// Newton polish of a root of theta -> Q_j(cos, sin) with bisection fallback.
double polish_angle(const SymMat& K, int j, double theta0) {
    double theta = theta0;
    for (int it = 0; it < 60; ++it) {
        double f = circle_Q(K, j, theta);
        double h = 1e-7;
        double df = (circle_Q(K, j, theta + h) - circle_Q(K, j, theta - h)) / (2.0 * h);
        if (std::fabs(df) < 1e-14) break;
        double step = f / df;
        theta -= step;
        if (std::fabs(step) < 1e-14) break;
    }
    if (std::fabs(circle_Q(K, j, theta)) <= std::fabs(circle_Q(K, j, theta0))) return theta;
    return theta0;
}

// Real roots of c3 t^3 + c2 t^2 + c1 t + c0 with leading coefficient known nonzero.
std::vector<double> cubic_roots(double c3, double c2, double c1, double c0) {
    double a = c2 / c3, b = c1 / c3, c = c0 / c3;
    double p = b - a * a / 3.0;
    double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    double shift = -a / 3.0;
    double disc = 0.25 * q * q + p * p * p / 27.0;
    // Near-zero discriminants are dominated by cancellation; preferring the
    // three-root branch there can at worst produce duplicates, never lose roots.
    double noise = 1e-12 * std::max(0.25 * q * q, std::fabs(p * p * p / 27.0));
    std::vector<double> roots;
    if (disc > noise) {
        double s = std::sqrt(disc);
        double big = -std::copysign(std::cbrt(std::fabs(q) * 0.5 + s), q);
        double small = (big == 0.0) ? 0.0 : -p / (3.0 * big);
        roots.push_back(shift + big + small);
    } else {
        double rho = std::sqrt(std::max(0.0, -p * p * p / 27.0));
        double phi = (rho > 0.0) ? std::acos(std::clamp(-0.5 * q / rho, -1.0, 1.0)) : 0.0;
        double mag = 2.0 * std::sqrt(std::max(0.0, -p / 3.0));
        for (int k = 0; k < 3; ++k)
            roots.push_back(shift + mag * std::cos((phi + 2.0 * pi * k) / 3.0));
    }
    return roots;
}

// Roots of c3 w^3 + c2 w^2 + c1 w + c0 for coefficients pre-normalized to max 1.
// A relatively tiny leading coefficient sends one root to infinity, reported as a
// chart pole, and the finite roots cascade down to a quadratic or linear solve.
struct ChartRoots {
    std::vector<double> w;
    bool pole = false;
};

ChartRoots chart_roots(double c3, double c2, double c1, double c0) {
    const double delta = 1e-7;
    ChartRoots out;
    if (std::fabs(c3) >= delta) {
        out.w = cubic_roots(c3, c2, c1, c0);
        return out;
    }
    out.pole = true;
    if (std::fabs(c2) >= delta) {
        double disc = c1 * c1 - 4.0 * c2 * c0;
        if (disc >= 0.0) {
            double s = std::sqrt(disc);
            double qq = -0.5 * (c1 + std::copysign(s, c1));
            if (qq != 0.0) {
                out.w.push_back(qq / c2);
                out.w.push_back(c0 / qq);
            } else {
                out.w.push_back(0.0);
            }
        } else if (disc > -1e-12 * std::max(c1 * c1, std::fabs(4.0 * c2 * c0))) {
            out.w.push_back(-0.5 * c1 / c2);
        }
    } else if (std::fabs(c1) >= delta) {
        out.w.push_back(-c0 / c1);
    }
    return out;
}

}  // namespace

DirectionSet exceptional_directions_2d(const SymMat& K, int j) {
    if (K.dim() != 2) throw std::domain_error("exceptional_directions_2d: needs d = 2");
    if (j < 0 || j > 1) throw std::domain_error("exceptional_directions_2d: component");
    DirectionSet ds;
    ds.component = j;

    // Cubic coefficients of Q_j(x1, x2) = a30 x1^3 + a21 x1^2 x2 + a12 x1 x2^2 + a03 x2^3,
    // pinned exactly by four probe evaluations.
    double q10 = eval_Q(K, {1.0, 0.0, 0.0}, j);
    double q01 = eval_Q(K, {0.0, 1.0, 0.0}, j);
    double qpp = eval_Q(K, {1.0, 1.0, 0.0}, j);
    double qpm = eval_Q(K, {1.0, -1.0, 0.0}, j);
    double a30 = q10;
    double a03 = q01;
    double a12 = 0.5 * (qpp + qpm) - a30;
    double a21 = 0.5 * (qpp - qpm) - a03;

    double scale = std::max(1.0, K.max_abs());
    double coef_tol = 1e-12 * scale;
    if (std::fabs(a30) <= coef_tol && std::fabs(a21) <= coef_tol &&
        std::fabs(a12) <= coef_tol && std::fabs(a03) <= coef_tol) {
        ds.all_directions = true;
        return ds;
    }

    // Q_j(cos t, sin t) = cos^3 t * (a30 + a21 u + a12 u^2 + a03 u^3), u = tan t.
    // Solve in whichever of the tan/cot charts carries the larger extreme coefficient
    // so the leading term is never relatively small; the chart pole covers the
    // remaining projective root when it is.
    double amax = std::max({std::fabs(a30), std::fabs(a21), std::fabs(a12), std::fabs(a03)});
    double b30 = a30 / amax, b21 = a21 / amax, b12 = a12 / amax, b03 = a03 / amax;
    std::vector<double> base;  // angles, any branch
    if (std::fabs(b03) >= std::fabs(b30)) {
        ChartRoots cr = chart_roots(b03, b12, b21, b30);
        for (double u : cr.w) base.push_back(std::atan(u));
        if (cr.pole) base.push_back(0.5 * pi);
    } else {
        ChartRoots cr = chart_roots(b30, b21, b12, b03);
        for (double v : cr.w) base.push_back(std::atan2(1.0, v));
        if (cr.pole) base.push_back(0.0);
    }

    std::vector<double> angles;
    for (double t : base) {
        double t1 = polish_angle(K, j, t);
        angles.push_back(t1);
        angles.push_back(t1 + pi);
    }
    for (double& t : angles) {
        t = std::fmod(t, 2.0 * pi);
        if (t < 0.0) t += 2.0 * pi;
    }
    std::sort(angles.begin(), angles.end());
    std::vector<double> unique;
    for (double t : angles) {
        if (unique.empty() || t - unique.back() > 1e-9) unique.push_back(t);
    }
    if (unique.size() > 1 && (2.0 * pi - unique.back()) + unique.front() < 1e-9)
        unique.pop_back();
    ds.angles = unique;
    for (double t : ds.angles) ds.residuals.push_back(std::fabs(circle_Q(K, j, t)));
    return ds;
}

CnsReport cns_equivalence_check(const SymMat& K, std::uint64_t seed, int n_points) {
    int d = K.dim();
    CnsReport rep;
    rep.isotropic = is_isotropic(K);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double tol = 1e-10 * std::max(1.0, K.max_abs());
    std::vector<bool> q_zero(d, true);
    for (int p = 0; p < n_points; ++p) {
        Vec3 w{0.0, 0.0, 0.0};
        double r = 0.0;
        while (r < 1e-8) {
            for (int i = 0; i < d; ++i) w[i] = gauss(rng);
            r = norm(w, d);
        }
        for (int i = 0; i < d; ++i) w[i] /= r;
        for (int j = 0; j < d; ++j)
            if (std::fabs(eval_Q(K, w, j)) > tol) q_zero[j] = false;
    }
    rep.all_Q_zero = true;
    rep.some_Q_zero = false;
    for (int j = 0; j < d; ++j) {
        if (!q_zero[j]) rep.all_Q_zero = false;
        if (q_zero[j]) rep.some_Q_zero = true;
    }
    rep.some_dQ_zero = false;
    for (int j = 0; j < d; ++j)
        if (dQj_form(K, j).max_abs() <= tol) rep.some_dQ_zero = true;
    rep.consistent = (rep.isotropic == rep.all_Q_zero) && (rep.isotropic == rep.some_Q_zero) &&
                     (rep.isotropic == rep.some_dQ_zero);
    return rep;
}

}  // namespace nsff
