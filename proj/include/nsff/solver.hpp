#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nsff/field.hpp"
#include "nsff/profile.hpp"

namespace nsff {

/// Stream-function family for divergence-free, rapidly decaying initial data.
struct InitialDataSpec {
    std::string family = "anisotropic";  // anisotropic|radial|quartic|tilted|oscillating|halfspace
    double amplitude = 1.0;
    double width = 1.0;
    Vec3 center{0.0, 0.0, 0.0};
};

/// Quadrature diagnostics of a datum reported at construction time.
struct DataInvariants {
    double a11 = 0.0;  ///< integral of a1^2
    double a22 = 0.0;  ///< integral of a2^2
    double a12 = 0.0;  ///< integral of a1 a2
    double sup_norm = 0.0;
    double support_radius = 0.0;  ///< largest |x - center|_inf where the stream
                                  ///< function exceeds 1e-12 of its peak
};

/// Builds a = perp-gradient of the family stream function by spectral differentiation;
/// throws std::invalid_argument when the effective support exceeds L/4.
VectorField make_initial_data(const InitialDataSpec& spec, const GridSpec& g,
                              DataInvariants* inv = nullptr);

/// Free-space heat evolution of every component through the padded transform; t >= 0.
VectorField heat_semigroup(const VectorField& a, double t);

/// Spectral Leray projection; the zero mode passes through unchanged.
VectorField leray_project(const VectorField& f);

using EnergyMatrix = SymMat;

struct EnergySample {
    double t;
    EnergyMatrix E;
};

struct SimulationRecord {
    std::vector<double> times;          ///< snapshot times
    std::vector<VectorField> fields;    ///< velocity snapshots on the box
    std::vector<VectorField> heat;      ///< matching heat-semigroup baselines
    std::vector<double> divergence;     ///< per-snapshot relative solenoidality defect,
                                        ///< measured spectrally on the full padded state
                                        ///< (the cropped snapshot itself carries a window
                                        ///< truncation error set by the far-field tail)
    std::vector<EnergySample> energy;   ///< per-step instantaneous energy matrix
    std::vector<EnergySample> K;        ///< per-step cumulative matrix (trapezoid)
    double cfl_peak = 0.0;
};

struct SolveOptions {
    bool linearized = false;  ///< test hook: drop the nonlinearity entirely
    double cfl_limit = 0.5;
};

/// Integrates the mild formulation with an exponential integrating factor and a
/// two-stage Runge-Kutta pass over the projected nonlinearity, dealiased by 2/3
/// truncation. record_at times must sit on the step lattice. Throws
/// std::runtime_error on CFL violation or non-finite values.
SimulationRecord solve_mild(const VectorField& a, double t_end, double dt,
                            const std::vector<double>& record_at, const SolveOptions& opt = {});

/// Returns the instantaneous and cumulative energy-matrix series of a record.
std::pair<std::vector<EnergySample>, std::vector<EnergySample>> energy_matrices(
    const SimulationRecord& record);

/// Recovers the pressure from the velocity trace equation by a free-space
/// (truncated-kernel) Poisson solve; normalized to vanish at infinity.
ScalarField recover_pressure(const VectorField& u);

}  // namespace nsff
