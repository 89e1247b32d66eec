#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsff/defs.hpp"
#include "nsff/field.hpp"
#include "nsff/solver.hpp"

namespace nsff {

/// Config-file failure carrying the 1-based source line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& message);
    int line() const { return line_; }

private:
    int line_;
};

/// Flat key = value experiment description, grouped by [section] headers.
/// Unknown sections or keys are rejected at parse time.
struct ExperimentConfig {
    // [grid]
    int d = 2;
    int n = 1024;
    double L = 32.0;
    int pad = 2;
    // [datum]
    std::string family = "anisotropic";
    double amplitude = 0.3;
    double width = 1.4;
    Vec3 center{};
    // [time]
    double t_end = 0.25;
    double dt = 1.0 / 512.0;
    std::vector<double> record_at{0.0, 0.0625, 0.125, 0.25};
    // [probe]
    int rays = 64;
    double delta_deg = 10.0;
    double r_min = 8.0;
    double r_max = 16.0;
    int n_radii = 10;
    int component = 0;
    // [directions] query matrix for the exceptional-direction report
    double k11 = 1.0;
    double k12 = 0.0;
    double k22 = 0.0;
    // [peetre]
    std::string weight_family = "poly";
    Vec3 weight_alpha{2.0, 1.0, 0.0};
    double weight_rate = 0.0;
    std::vector<double> peetre_times{0.25, 1.0, 4.0};
    // [output]
    std::string out_dir = "out";
    // [random]
    std::uint64_t seed = 1;
    // [suite]
    std::vector<std::string> suites{"fast"};
    // [tolerances]
    double profile_rel = 0.25;
    double exponent_slack = 0.3;
    double lower_factor = 0.25;
    double upper_factor = 4.0;
    double exceptional_factor = 0.1;
    double pressure_rel = 0.25;
    double iso_variation = 0.05;

    /// Cross-field sanity; throws std::invalid_argument with the offending key.
    void validate() const;
};

/// Parses config text; throws ConfigError with a line diagnostic.
ExperimentConfig parse_config(const std::string& text);

/// Reads and parses a config file; throws std::runtime_error if unreadable.
ExperimentConfig load_config(const std::string& path);

/// Canonical text form; parse_config(render_config(c)) reproduces c.
std::string render_config(const ExperimentConfig& c);

/// Shortest exact decimal form of v (round-trips through strtod).
std::string format_double(double v);

/// Writes rows of doubles under a header line; deterministic formatting.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Raw little-endian doubles, header {d, n, L, time}, then components row-major.
void write_snapshot(const std::string& path, const VectorField& u);
VectorField read_snapshot(const std::string& path);

/// Energy-series CSV: t followed by the upper triangle of the matrix.
void write_energy_csv(const std::string& path, const std::vector<EnergySample>& series);

/// One verified claim; every emitted line carries its anchor string.
struct AssertionLine {
    std::string name;
    std::string anchor;
    double value = 0.0;
    std::string op;        ///< "<=", ">=", or "in"
    double bound = 0.0;    ///< the bound, or interval low for "in"
    double bound_hi = 0.0; ///< interval high for "in"
    bool pass = false;
};

AssertionLine check_le(const std::string& name, const std::string& anchor, double value,
                       double bound);
AssertionLine check_ge(const std::string& name, const std::string& anchor, double value,
                       double bound);
AssertionLine check_in(const std::string& name, const std::string& anchor, double value, double lo,
                       double hi);

/// Aligned human-readable form, e.g. "PASS  inf_factor 0.41 >= 0.25  Theorem 3.1 ...".
std::string format_assertion(const AssertionLine& a);

}  // namespace nsff
