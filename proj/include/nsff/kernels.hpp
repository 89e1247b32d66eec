#pragma once

#include <utility>
#include <vector>

#include "nsff/defs.hpp"
#include "nsff/field.hpp"

namespace nsff {

/// Component triple (j; h, k) of the convolution kernel, zero-based; symmetric in (h, k).
struct KernelIndex {
    int j = 0;
    int h = 0;
    int k = 0;
};

/// One kernel evaluation split into its exact parts.
struct KernelValue {
    double total = 0.0;    ///< part1 + part2
    double part1 = 0.0;    ///< gaussian-localized piece
    double part2 = 0.0;    ///< time-integrated gradient piece
    double leading = 0.0;  ///< homogeneous degree -(d+1) far-field term
    double psi = 0.0;      ///< remainder profile evaluated at y = x / sqrt(t)
};

/// Heat kernel (4 pi t)^{-d/2} exp(-|x|^2 / 4t); throws std::domain_error for t <= 0.
double gaussian(const Vec3& x, double t, int d);

/// Gaussian-localized kernel part; vanishes at x = 0.
double eval_F1(const KernelIndex& idx, const Vec3& x, double t, int d);

/// Time-integrated third-gradient part, evaluated via lower incomplete gamma; 0 at x = 0.
double eval_F2(const KernelIndex& idx, const Vec3& x, double t, int d);

/// Homogeneous far-field term gamma_d (sigma_jhk(x) / |x|^{d+2} - (d+2) x_j x_h x_k / |x|^{d+4});
/// throws std::domain_error at x = 0.
double leading_term(const KernelIndex& idx, const Vec3& x, int d);

/// Self-similar remainder profile Psi(y) in F = leading + |x|^{-(d+1)} Psi(x / sqrt(t)).
double eval_Psi(const KernelIndex& idx, const Vec3& y, int d);

/// Full evaluation; total = part1 + part2 exactly, all fields 0 at x = 0.
KernelValue eval_F(const KernelIndex& idx, const Vec3& x, double t, int d);

/// Samples F(., t) on the grid box, convolves with the sampled heat kernel at time 1
/// (zero-padded linear convolution), and returns the max-norm mismatch against F(., t+1)
/// measured in the window |x| <= L/2. Throws std::domain_error if the grid cannot
/// resolve the fields (needs L >= 8 sqrt(t+1) and dx <= sqrt(t)/4).
double check_gshift(const KernelIndex& idx, double t, const GridSpec& grid);

/// Total L1 norm of F(., t), summed over all independent component triples.
double kernel_l1_norm(double t, int d);

/// Returns (t, ||F(., t)||_L1 * sqrt(t)) for each requested time; the products are
/// constant in t by parabolic self-similarity.
std::vector<std::pair<double, double>> l1_norm_scaling(const std::vector<double>& times, int d);

/// Max over an n^d integer frequency lattice of the relative residual of the
/// divergence contraction xi_j (1/2 (xi_h delta_jk + xi_k delta_jh) - xi_j xi_h xi_k / |xi|^2).
double divergence_symbol_residual(int n, int d);

}  // namespace nsff
