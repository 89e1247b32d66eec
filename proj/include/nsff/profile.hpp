#pragma once

#include <cstdint>
#include <vector>

#include "nsff/defs.hpp"

namespace nsff {

/// Symmetric d x d matrix (d = 2 or 3); storage enforces symmetry.
class SymMat {
public:
    explicit SymMat(int dim);
    static SymMat identity(int dim, double scale = 1.0);
    static SymMat unit(int dim, int h, int k);  // e_h e_k^T + e_k e_h^T restricted symmetric
    /// Build from full rows; throws if the rows are not symmetric.
    static SymMat from_rows(const std::vector<std::vector<double>>& rows, double tol = 0.0);

    int dim() const { return dim_; }
    double at(int h, int k) const;
    void set(int h, int k, double v);
    void add(int h, int k, double v);

    double trace() const;
    double max_abs() const;
    Vec3 apply(const Vec3& x) const;          // K x
    double quad(const Vec3& x) const;         // x . K x
    SymMat& axpy(double alpha, const SymMat& other);
    SymMat scaled(double alpha) const;
    SymMat minus(const SymMat& other) const;
    std::vector<double> eigenvalues() const;  // ascending

private:
    int dim_;
    double m_[9];
};

/// Profile normalization constant, pi^{-d/2} * Gamma((d+2)/2).
double gamma_const(int d);

/// sigma_{j,h,k}(x) = delta_{jh} x_k + delta_{jk} x_h + delta_{hk} x_j.
double sigma_jhk(int j, int h, int k, const Vec3& x);

/// Far-field potential Pi(x) = gamma_d * (tr K / (d |x|^d) - x.Kx / |x|^{d+2}).
double eval_Pi(const SymMat& K, const Vec3& x);

/// Gradient of Pi; equals eval_P(K,x) / |x|^{d+4} away from the origin.
Vec3 eval_gradPi(const SymMat& K, const Vec3& x);

/// Homogeneous cubic numerator P_j = gamma_d sum_{h,k} ((d+2) x_j x_h x_k - |x|^2 sigma_jhk) K_hk.
Vec3 eval_P(const SymMat& K, const Vec3& x);

/// Q_j = sum_{h,k} (|x|^2 sigma_jhk - (d+2) x_j x_h x_k) K_hk = -P_j / gamma_d.
double eval_Q(const SymMat& K, const Vec3& x, int j);

/// Symmetric matrix M with d_j Q_j(x) = x . M x (single fixed j, no sum).
SymMat dQj_form(const SymMat& K, int j);

/// True when K is proportional to the identity within rel_tol (floored at 1e-12).
bool is_isotropic(const SymMat& K, double rel_tol = 1e-12);

/// Zero set of a direction polynomial Q_j on the unit circle (d = 2).
struct DirectionSet {
    int component = 0;
    bool all_directions = false;   // Q_j vanishes identically
    std::vector<double> angles;    // radians in [0, 2pi), sorted
    std::vector<double> residuals; // |Q_j(cos a, sin a)| at each angle
};

/// Roots of Q_j on the circle via the tan-substituted cubic plus pole checks.
DirectionSet exceptional_directions_2d(const SymMat& K, int j);

/// Equivalence of the four vanishing statements for the far-field profile.
struct CnsReport {
    bool isotropic = false;     // K proportional to identity
    bool all_Q_zero = false;    // every Q_j vanishes (random sphere sample)
    bool some_Q_zero = false;   // at least one Q_j vanishes
    bool some_dQ_zero = false;  // at least one d_j Q_j vanishes (symbolic form)
    bool consistent = false;    // all four statements agree
};

CnsReport cns_equivalence_check(const SymMat& K, std::uint64_t seed, int n_points = 100);

}  // namespace nsff
