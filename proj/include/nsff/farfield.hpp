#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nsff/defs.hpp"
#include "nsff/profile.hpp"
#include "nsff/solver.hpp"

namespace nsff {

/// Bilinear (d=2) or trilinear (d=3) interpolation of a box field at x.
double interp_sample(const ScalarField& f, const Vec3& x);

/// Power-law fit of positive samples against radius, with robustness data.
struct DecayFit {
    double exponent = 0.0;   ///< slope of log value against log radius
    double amplitude = 0.0;  ///< prefactor so value ~ amplitude * r^exponent
    double residual = 0.0;   ///< max absolute log-log deviation from the fit
    double jackknife = 0.0;  ///< max exponent change when one radius is dropped
    double r_min = 0.0;
    double r_max = 0.0;
    int points_used = 0;
};

/// Least-squares decay fit; requires at least 8 radii and positive values.
DecayFit fit_decay(const std::vector<double>& radii, const std::vector<double>& values);

/// Samples of a velocity snapshot along one ray from the origin.
struct RayProbe {
    Vec3 direction{};             ///< unit vector
    std::vector<double> radii;    ///< increasing, all within the analysis window
    std::vector<Vec3> values;     ///< interpolated velocity components per radius
    double time = 0.0;
};

/// Interpolate u along direction at the given radii; radii must fit in |x| <= L/2.
RayProbe probe_ray(const VectorField& u, const Vec3& direction, const std::vector<double>& radii);

/// Logarithmically spaced radii covering [r0, r1].
std::vector<double> log_radii(double r0, double r1, int count);

/// Unit vectors at evenly spaced angles in [0, 2pi), optionally offset (d=2).
std::vector<Vec3> ray_fan(int count, double offset_deg = 0.0);

struct ProfileRay {
    double theta_deg = 0.0;
    double max_rel_err = 0.0;  ///< against the gradient profile, when active
    DecayFit residual;         ///< decay of the remainder after all subtractions
};

struct ProfileReport {
    double t = 0.0;
    bool profile_active = false;  ///< false when K(t) is isotropic
    double predicted_ratio = 0.0; ///< remainder-to-leading scale sqrt(t)/r_min
    std::vector<ProfileRay> rays;
    double worst_rel_err = 0.0;
    double worst_exponent = 0.0;  ///< largest residual exponent over rays
};

/// Compare u - heat against the gradient profile along rays at snapshot time t.
ProfileReport verify_profile(const SimulationRecord& rec, double t,
                             const std::vector<Vec3>& directions,
                             const std::vector<double>& radii);

struct BoundsRay {
    double theta_deg = 0.0;
    bool admissible = false;  ///< at least delta away from the exceptional set
    double c_min = 0.0;       ///< inf over radii of |u_j| r^{d+1} / t
    double c_max = 0.0;       ///< sup over radii of |u| r^{d+1} / t
    double predicted = 0.0;   ///< |P_j(omega)| from the initial energy matrix
};

struct BoundsReport {
    double t = 0.0;
    int component = 0;
    double kappa = 0.0;            ///< window floor factor max{1, t^{-1/2}}
    double delta_deg = 0.0;
    std::vector<BoundsRay> rays;
    std::vector<double> exceptional_deg;  ///< zero angles of the direction polynomial
    double inf_factor = 0.0;       ///< min over admissible rays of c_min / predicted
    double sup_factor = 0.0;       ///< max over all rays of c_max / max predicted
    double exceptional_ratio = 0.0;  ///< normalized value on the worst excluded ray
                                     ///< against the admissible-ray median
};

/// Directional upper/lower bound check for component j at snapshot time t (d=2).
BoundsReport bounds_check(const SimulationRecord& rec, double t, int component,
                          int n_rays, double delta_deg,
                          const std::vector<double>& radii);

/// Annulus integrals (R, int_{R<=|x|<=2R} |u_j|) at snapshot time t.
std::vector<std::pair<double, double>> shell_integral(const SimulationRecord& rec, double t,
                                                      int component,
                                                      const std::vector<double>& R_list);

/// Weighted Lebesgue norm with weight (1+|x|)^alpha; p may be infinity.
double weighted_norm(const VectorField& u, double p, double alpha);

struct SlopeResult {
    double p = 2.0;
    double alpha = 0.0;
    double slope = 0.0;           ///< log-log slope of the norm over snapshot times
    double predicted_floor = 0.0; ///< -(d+1-alpha-d/p)/2
    bool skipped = false;         ///< cumulative matrix isotropic at the final time
};

/// Fit norm decay over all snapshots; record must span well-separated times.
std::vector<SlopeResult> large_time_slopes(const SimulationRecord& rec,
                                           const std::vector<std::pair<double, double>>& norms);

struct PressureReport {
    double t = 0.0;
    bool profile_active = false;   ///< false when E(t) is isotropic
    double max_rel_err = 0.0;      ///< against the pressure profile, generic rays only
    double angular_variation = 0.0;  ///< spread of p r^d over angles, isotropic case
    std::vector<double> degenerate_deg;  ///< angles where the profile prediction vanishes
    DecayFit residual;
};

/// Compare recovered pressure against its far-field profile at snapshot time t.
/// Relative error is taken only on rays at least delta_deg away from the zero
/// angles of the quadrupole prediction, where it would otherwise degenerate.
PressureReport pressure_profile_check(const SimulationRecord& rec, double t,
                                      const std::vector<double>& radii,
                                      double delta_deg = 10.0);

/// Weight families for persistence checks: 1 + sum |x_i|^{alpha_i},
/// (1 + |x|)^rate, or e^{rate |x|}.
struct WeightSpec {
    std::string family = "poly";  ///< "poly", "radial", or "exp"
    Vec3 alpha{};                 ///< per-axis exponents for the poly family
    double rate = 0.0;            ///< exponent (radial) or growth rate (exp)
};

double weight_value(const WeightSpec& m, const Vec3& x, int d);

struct PeetreReport {
    double c0 = 0.0;        ///< worst m(x+y) / (m(x) m(y)) over sampled pairs
    double max_ratio = 0.0; ///< worst weighted-sup persistence ratio over times
    std::vector<double> ratios;  ///< one persistence ratio per requested time
};

/// Submultiplicativity of m plus heat persistence of the weighted sup norm.
PeetreReport peetre_check(const WeightSpec& m, const VectorField& a,
                          const std::vector<double>& t_list, std::uint64_t seed);

/// Even/odd mirror of the upper half space across x_d = 0 onto the whole box.
VectorField halfspace_extend(const VectorField& u_half, double bc_tol = 1e-6);

struct StabilityReport {
    double value_t0 = 0.0;    ///< sup of |u|(1+|x|)^theta m(x) at time zero
    double value_t = 0.0;     ///< same at the requested time
    double ratio = 0.0;
    double far_slope = 0.0;   ///< radial slope of the weighted ray maxima over the
                              ///< outer half-window; clear growth flags a weight
                              ///< stronger than the far-field tail admits
    bool edge_attained = false;  ///< sup of the later field sits at the window edge
};

/// Weighted-sup persistence of a run against the anisotropic weight m.
StabilityReport anisotropic_stability_check(const SimulationRecord& rec, double t,
                                            double theta, const WeightSpec& m);

}  // namespace nsff
