// Acceptance gate: one line per criterion, nonzero exit on any failure.
// Heavy runs are shared between criteria; pass --only 5,7 to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nsff/farfield.hpp"
#include "nsff/kernels.hpp"
#include "nsff/profile.hpp"
#include "nsff/solver.hpp"

using namespace nsff;

namespace {

int g_failures = 0;
std::vector<int> g_only;

bool selected(int id) {
    return g_only.empty() || std::count(g_only.begin(), g_only.end(), id) > 0;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

void emit(int id, bool pass, const std::string& detail) {
    std::printf("[%2d] %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

SimulationRecord run_case(const std::string& family, int n, double L, int pad, double width,
                          double amplitude, double dt, double t_end,
                          const std::vector<double>& record_at) {
    GridSpec g{2, n, L, pad};
    InitialDataSpec spec{family, amplitude, width, {}};
    VectorField a = make_initial_data(spec, g);
    return solve_mild(a, t_end, dt, record_at);
}

double sup_diff(const VectorField& u, const VectorField& v) {
    double worst = 0.0;
    for (std::size_t c = 0; c < u.comp.size(); ++c)
        for (int i = 0; i < u.grid.n; ++i)
            for (int j = 0; j < u.grid.n; ++j)
                worst = std::max(worst, std::fabs(u.comp[c].at(i, j) - v.comp[c].at(i, j)));
    return worst;
}

double loglog_slope(const std::vector<double>& t, const std::vector<double>& v) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    auto nn = static_cast<double>(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        double x = std::log(t[i]), y = std::log(v[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
}

// ---- criteria ------------------------------------------------------------

void c1_kernel_identity() {
    const double t = 0.25;
    double worst = 0.0;
    for (int j = 0; j < 2; ++j)
        for (int h = 0; h < 2; ++h)
            for (int k = h; k < 2; ++k)
                for (int a = 0; a < 10; ++a)
                    for (int b = 0; b < 10; ++b) {
                        Vec3 x{0.35 + 0.4 * a, 0.15 + 0.4 * b, 0.0};
                        double r = std::hypot(x[0], x[1]);
                        KernelIndex idx{j, h, k};
                        double rec = leading_term(idx, x, 2) +
                                     std::pow(r, -3.0) *
                                         eval_Psi(idx,
                                                  Vec3{x[0] / std::sqrt(t), x[1] / std::sqrt(t),
                                                       0.0},
                                                  2);
                        worst = std::max(worst,
                                         std::fabs(eval_F(idx, x, t, 2).total - rec));
                    }
    emit(1, worst <= 1e-8,
         fmt("kernel decomposition identity: max residual %.3g <= 1e-8", worst));
}

void c2_gshift() {
    GridSpec g{2, 256, 16.0};
    double worst = 0.0;
    for (double t : {0.25, 1.0})
        worst = std::max({worst, check_gshift({0, 0, 0}, t, g), check_gshift({1, 0, 1}, t, g)});
    emit(2, worst <= 1e-6, fmt("gaussian shift residual: max %.3g <= 1e-6 at t in {0.25,1}", worst));
}

void c3_l1_scaling() {
    auto prods = l1_norm_scaling({0.25, 1.0, 4.0}, 2);
    double lo = prods.front().second, hi = lo;
    for (auto [t, p] : prods) {
        lo = std::min(lo, p);
        hi = std::max(hi, p);
    }
    double spread = (hi - lo) / lo;
    emit(3, spread <= 1e-5, fmt("L1 norm parabolic scaling: rel spread %.3g <= 1e-5", spread));
}

void c4_cns() {
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    int violations = 0;
    for (int d : {2, 3})
        for (int trial = 0; trial < 1000; ++trial) {
            std::vector<std::vector<double>> rows(d, std::vector<double>(d, 0.0));
            for (int h = 0; h < d; ++h)
                for (int k = h; k < d; ++k) rows[h][k] = rows[k][h] = dist(rng);
            CnsReport rep = cns_equivalence_check(SymMat::from_rows(rows),
                                                  3000 + 7 * trial + d);
            if (!rep.consistent) ++violations;
        }

    DirectionSet ds = exceptional_directions_2d(SymMat::unit(2, 0, 0), 0);
    const double expect[6] = {30.0, 90.0, 150.0, 210.0, 270.0, 330.0};
    double worst_angle = std::numeric_limits<double>::infinity();
    if (ds.angles.size() == 6) {
        worst_angle = 0.0;
        for (int i = 0; i < 6; ++i)
            worst_angle =
                std::max(worst_angle, std::fabs(ds.angles[i] * 180.0 / pi - expect[i]));
    }
    bool ok = violations == 0 && worst_angle <= 1e-9;
    emit(4, ok,
         fmt("CNS equivalence: %d violations in 2000 random K; e11 angles off by %.3g <= 1e-9",
             violations, worst_angle));
}

void c5_profile(const SimulationRecord& rec) {
    ProfileReport pr = verify_profile(rec, 0.25, ray_fan(16, 4.5), log_radii(8.0, 16.0, 10));
    bool ok = pr.profile_active && pr.worst_rel_err <= 0.25 && pr.worst_exponent <= -3.7;
    emit(5, ok,
         fmt("profile agreement: rel err %.4f <= 0.25, residual exponent %.3f <= -3.7",
             pr.worst_rel_err, pr.worst_exponent));
}

void c7_bounds(const SimulationRecord& rec) {
    std::vector<double> rr = log_radii(8.0, 16.0, 10);
    bool ok = true;
    std::string detail = "spreading bounds:";
    for (double t : {0.0625, 0.125}) {
        BoundsReport b = bounds_check(rec, t, 0, 64, 10.0, rr);
        bool here =
            b.inf_factor >= 0.25 && b.sup_factor <= 4.0 && b.exceptional_ratio <= 0.1;
        ok = ok && here;
        detail += fmt(" [t=%g inf %.3f sup %.3f exc %.4f]", t, b.inf_factor, b.sup_factor,
                      b.exceptional_ratio);
    }
    emit(7, ok, detail + " vs >=0.25 / <=4 / <=0.1");
}

void c8_shells(const SimulationRecord& rec) {
    auto shells = shell_integral(rec, 0.125, 0, {6.0, 9.0, 12.0});
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (auto [R, I] : shells) {
        double scaled = R * I / 0.125;
        lo = std::min(lo, scaled);
        hi = std::max(hi, scaled);
    }
    emit(8, hi / lo <= 2.0, fmt("shell integrals: R*I/t ratio %.3f <= 2 over R in {6,9,12}", hi / lo));
}

void c9_pressure(const SimulationRecord& aniso, const SimulationRecord& iso) {
    PressureReport pa = pressure_profile_check(aniso, 0.25, log_radii(8.0, 16.0, 10));
    PressureReport pi_rep = pressure_profile_check(iso, 0.25, log_radii(1.6, 3.2, 10));
    bool ok = pa.profile_active && pa.max_rel_err <= 0.25 && !pi_rep.profile_active &&
              pi_rep.angular_variation <= 0.05;
    emit(9, ok,
         fmt("pressure profile: aniso rel err %.4f <= 0.25; iso angular variation %.4f <= 0.05",
             pa.max_rel_err, pi_rep.angular_variation));
}

void c6_null_case(const SimulationRecord& rec) {
    ProfileReport pr = verify_profile(rec, 0.25, ray_fan(16, 4.5), log_radii(8.0, 16.0, 10));
    bool ok = !pr.profile_active && pr.worst_exponent <= -3.7;
    emit(6, ok,
         fmt("isotropic null case: gradient profile %s, u-heat exponent %.3f <= -3.7",
             pr.profile_active ? "NOT flagged" : "flagged zero", pr.worst_exponent));
}

void c10_halfspace(const SimulationRecord& rec) {
    const SymMat& K = rec.K.back().E;
    double k12 = std::fabs(K.at(0, 1));

    std::vector<double> rr = log_radii(8.0, 16.0, 10);
    std::vector<double> tangential, normal;
    for (double r : rr) {
        Vec3 x{r, 1.0, 0.0};
        tangential.push_back(std::fabs(interp_sample(rec.fields.back().comp[0], x)));
        normal.push_back(std::fabs(interp_sample(rec.fields.back().comp[1], x)));
    }
    DecayFit tf = fit_decay(rr, tangential);
    DecayFit nf = fit_decay(rr, normal);
    bool ok = k12 <= 1e-13 && nf.exponent <= -3.7 && tf.exponent >= -3.2 &&
              tf.exponent <= -2.8;
    emit(10, ok,
         fmt("half-space: K12 %.3g <= 1e-13, normal exp %.3f <= -3.7, tangential exp %.3f in "
             "[-3.2,-2.8]",
             k12, nf.exponent, tf.exponent));
}

void c11_large_time() {
    // Generic first-moment datum: the decay floors are attained inside [1, 16],
    // so the measured slopes test them directly. A datum with faster linear
    // decay leaves the nonlinear floor numerically invisible at this smallness.
    GridSpec g{2, 256, 32.0, 2};
    InitialDataSpec unit{"anisotropic", 1.0, 1.4, {}};
    VectorField probe = make_initial_data(unit, g);
    double weighted_sup = 0.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            double r = std::hypot(g.coord(i), g.coord(j));
            double speed = std::hypot(probe.comp[0].at(i, j), probe.comp[1].at(i, j));
            weighted_sup = std::max(weighted_sup, speed * (1.0 + r));
        }
    double amp = 0.099 / weighted_sup;

    InitialDataSpec spec{"anisotropic", amp, 1.4, {}};
    VectorField a = make_initial_data(spec, g);
    SimulationRecord rec = solve_mild(a, 16.0, 1.0 / 64.0, {1.0, 2.0, 4.0, 8.0, 16.0});

    const double inf = std::numeric_limits<double>::infinity();
    auto slopes = large_time_slopes(rec, {{2.0, 0.0}, {inf, 3.0}});
    double s2 = slopes[0].slope, sw = slopes[1].slope;

    std::vector<double> heat_l2;
    for (const VectorField& h : rec.heat) heat_l2.push_back(weighted_norm(h, 2.0, 0.0));
    double heat_slope = loglog_slope(rec.times, heat_l2);

    bool ok = s2 >= -1.3 && sw >= -0.3;
    emit(11, ok,
         fmt("large-time slopes: L2 %.3f >= -1.3, weighted sup %.3f >= -0.3 (heat-only L2 %.3f)",
             s2, sw, heat_slope));
}

void c12_convergence() {
    GridSpec g{2, 256, 32.0, 2};
    InitialDataSpec spec{"anisotropic", 0.3, 1.4, {}};
    VectorField a = make_initial_data(spec, g);
    std::vector<VectorField> sols;
    for (double dt : {1.0 / 256.0, 1.0 / 512.0, 1.0 / 1024.0})
        sols.push_back(solve_mild(a, 0.0625, dt, {0.0625}).fields.back());
    double d1 = sup_diff(sols[0], sols[1]);
    double d2 = sup_diff(sols[1], sols[2]);
    double order = std::log2(d1 / d2);

    GridSpec g4{2, 256, 32.0, 4};
    VectorField a4 = make_initial_data(spec, g4);
    VectorField u4 = solve_mild(a4, 0.0625, 1.0 / 512.0, {0.0625}).fields.back();
    double rel_pad = sup_diff(sols[1], u4) / sols[1].max_abs();

    bool ok = order >= 1.8 && rel_pad <= 1e-8;
    emit(12, ok,
         fmt("self-convergence: temporal order %.2f >= 1.8, padding invariance %.3g <= 1e-8",
             order, rel_pad));
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            const char* s = argv[++i];
            while (*s) {
                g_only.push_back(std::atoi(s));
                while (*s && *s != ',') ++s;
                if (*s == ',') ++s;
            }
        }
    }

    if (selected(1)) c1_kernel_identity();
    if (selected(2)) c2_gshift();
    if (selected(3)) c3_l1_scaling();
    if (selected(4)) c4_cns();

    std::optional<SimulationRecord> aniso;
    if (selected(5) || selected(7) || selected(8) || selected(9))
        aniso = run_case("anisotropic", 1024, 48.0, 2, 2.0, 0.3, 1.0 / 512.0, 0.25,
                         {0.0, 0.0625, 0.125, 0.25});
    if (selected(5)) c5_profile(*aniso);

    if (selected(6)) {
        SimulationRecord quartic =
            run_case("quartic", 1024, 32.0, 2, 1.4, 0.3, 1.0 / 512.0, 0.25, {0.0, 0.25});
        c6_null_case(quartic);
    }

    if (selected(7)) c7_bounds(*aniso);
    if (selected(8)) c8_shells(*aniso);
    if (selected(9)) {
        SimulationRecord iso =
            run_case("radial", 512, 8.0, 2, 0.35, 0.5, 1.0 / 512.0, 0.25, {0.0, 0.25});
        c9_pressure(*aniso, iso);
    }

    if (selected(10)) {
        SimulationRecord half =
            run_case("halfspace", 1024, 32.0, 2, 1.0, 0.5, 1.0 / 512.0, 0.25, {0.0, 0.25});
        c10_halfspace(half);
    }

    if (selected(11)) c11_large_time();
    if (selected(12)) c12_convergence();

    int total = g_only.empty() ? 12 : static_cast<int>(g_only.size());
    std::printf("acceptance: %d/%d passed\n", total - g_failures, total);
    return g_failures == 0 ? 0 : 1;
}
