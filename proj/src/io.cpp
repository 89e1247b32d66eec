#include "nsff/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace nsff {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_number(int line, const std::string& key, const std::string& text) {
    const char* c = text.c_str();
    char* end = nullptr;
    double v = std::strtod(c, &end);
    if (end == c || *end != '\0')
        throw ConfigError(line, "invalid number for key '" + key + "': '" + text + "'");
    return v;
}

long long parse_integer(int line, const std::string& key, const std::string& text) {
    double v = parse_number(line, key, text);
    long long iv = static_cast<long long>(v);
    if (static_cast<double>(iv) != v)
        throw ConfigError(line, "key '" + key + "' expects an integer, got '" + text + "'");
    return iv;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> parse_number_list(int line, const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const std::string& item : split_list(text)) out.push_back(parse_number(line, key, item));
    if (out.empty()) throw ConfigError(line, "key '" + key + "' expects a non-empty list");
    return out;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i];
    }
    return out;
}

std::string join_numbers(const std::vector<double>& items) {
    std::vector<std::string> s;
    for (double v : items) s.push_back(format_double(v));
    return join(s);
}

}  // namespace

ConfigError::ConfigError(int line, const std::string& message)
    : std::runtime_error("config line " + std::to_string(line) + ": " + message), line_(line) {}

void ExperimentConfig::validate() const {
    GridSpec g{d, n, L, pad};
    g.validate();
    if (amplitude < 0.0) throw std::invalid_argument("datum.amplitude must be >= 0");
    if (width <= 0.0) throw std::invalid_argument("datum.width must be > 0");
    if (dt <= 0.0) throw std::invalid_argument("time.dt must be > 0");
    if (t_end < dt) throw std::invalid_argument("time.t_end must be >= time.dt");
    if (record_at.empty()) throw std::invalid_argument("time.record_at must be non-empty");
    for (std::size_t i = 0; i < record_at.size(); ++i) {
        if (record_at[i] < 0.0 || record_at[i] > t_end + 1e-12)
            throw std::invalid_argument("time.record_at entries must lie in [0, t_end]");
        if (i > 0 && record_at[i] <= record_at[i - 1])
            throw std::invalid_argument("time.record_at must be strictly increasing");
    }
    if (rays < 4) throw std::invalid_argument("probe.rays must be >= 4");
    if (delta_deg < 0.0 || delta_deg >= 45.0)
        throw std::invalid_argument("probe.delta_deg must lie in [0, 45)");
    if (!(r_min > 0.0) || !(r_max > r_min))
        throw std::invalid_argument("probe.r_min/r_max must satisfy 0 < r_min < r_max");
    if (r_max > L / 2.0 + 1e-12)
        throw std::invalid_argument("probe.r_max must not exceed L/2");
    if (n_radii < 8) throw std::invalid_argument("probe.n_radii must be >= 8");
    if (component < 0 || component >= d)
        throw std::invalid_argument("probe.component must lie in [0, d)");
    for (double t : peetre_times)
        if (t <= 0.0) throw std::invalid_argument("peetre.times entries must be > 0");
    if (out_dir.empty()) throw std::invalid_argument("output.dir must be non-empty");
    for (const std::string& s : suites)
        if (s != "fast" && s != "slow")
            throw std::invalid_argument("suite.names entries must be 'fast' or 'slow'");
    if (suites.empty()) throw std::invalid_argument("suite.names must be non-empty");
    for (double tol : {profile_rel, exponent_slack, lower_factor, upper_factor,
                       exceptional_factor, pressure_rel, iso_variation})
        if (tol <= 0.0) throw std::invalid_argument("tolerances must be > 0");
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig c;
    std::set<std::string> seen;
    std::string section;
    std::stringstream ss(text);
    std::string raw;
    int line = 0;
    while (std::getline(ss, raw)) {
        ++line;
        std::string s = trim(raw);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError(line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            static const std::set<std::string> known{"grid",   "datum",  "time",       "probe",
                                                    "directions", "peetre", "output",
                                                    "random", "suite",  "tolerances"};
            if (!known.count(section)) throw ConfigError(line, "unknown section '" + section + "'");
            continue;
        }
        std::size_t eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(line, "expected key = value");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty()) throw ConfigError(line, "empty key");
        if (section.empty()) throw ConfigError(line, "key '" + key + "' before any [section]");
        std::string full = section + "." + key;
        if (!seen.insert(full).second) throw ConfigError(line, "duplicate key '" + full + "'");

        if (full == "grid.d")
            c.d = static_cast<int>(parse_integer(line, full, value));
        else if (full == "grid.n")
            c.n = static_cast<int>(parse_integer(line, full, value));
        else if (full == "grid.L")
            c.L = parse_number(line, full, value);
        else if (full == "grid.pad")
            c.pad = static_cast<int>(parse_integer(line, full, value));
        else if (full == "datum.family")
            c.family = value;
        else if (full == "datum.amplitude")
            c.amplitude = parse_number(line, full, value);
        else if (full == "datum.width")
            c.width = parse_number(line, full, value);
        else if (full == "datum.center_x")
            c.center[0] = parse_number(line, full, value);
        else if (full == "datum.center_y")
            c.center[1] = parse_number(line, full, value);
        else if (full == "datum.center_z")
            c.center[2] = parse_number(line, full, value);
        else if (full == "time.t_end")
            c.t_end = parse_number(line, full, value);
        else if (full == "time.dt")
            c.dt = parse_number(line, full, value);
        else if (full == "time.record_at")
            c.record_at = parse_number_list(line, full, value);
        else if (full == "probe.rays")
            c.rays = static_cast<int>(parse_integer(line, full, value));
        else if (full == "probe.delta_deg")
            c.delta_deg = parse_number(line, full, value);
        else if (full == "probe.r_min")
            c.r_min = parse_number(line, full, value);
        else if (full == "probe.r_max")
            c.r_max = parse_number(line, full, value);
        else if (full == "probe.n_radii")
            c.n_radii = static_cast<int>(parse_integer(line, full, value));
        else if (full == "probe.component")
            c.component = static_cast<int>(parse_integer(line, full, value));
        else if (full == "directions.k11")
            c.k11 = parse_number(line, full, value);
        else if (full == "directions.k12")
            c.k12 = parse_number(line, full, value);
        else if (full == "directions.k22")
            c.k22 = parse_number(line, full, value);
        else if (full == "peetre.weight_family")
            c.weight_family = value;
        else if (full == "peetre.alpha_x")
            c.weight_alpha[0] = parse_number(line, full, value);
        else if (full == "peetre.alpha_y")
            c.weight_alpha[1] = parse_number(line, full, value);
        else if (full == "peetre.alpha_z")
            c.weight_alpha[2] = parse_number(line, full, value);
        else if (full == "peetre.rate")
            c.weight_rate = parse_number(line, full, value);
        else if (full == "peetre.times")
            c.peetre_times = parse_number_list(line, full, value);
        else if (full == "output.dir")
            c.out_dir = value;
        else if (full == "random.seed")
            c.seed = static_cast<std::uint64_t>(parse_integer(line, full, value));
        else if (full == "suite.names")
            c.suites = split_list(value);
        else if (full == "tolerances.profile_rel")
            c.profile_rel = parse_number(line, full, value);
        else if (full == "tolerances.exponent_slack")
            c.exponent_slack = parse_number(line, full, value);
        else if (full == "tolerances.lower_factor")
            c.lower_factor = parse_number(line, full, value);
        else if (full == "tolerances.upper_factor")
            c.upper_factor = parse_number(line, full, value);
        else if (full == "tolerances.exceptional_factor")
            c.exceptional_factor = parse_number(line, full, value);
        else if (full == "tolerances.pressure_rel")
            c.pressure_rel = parse_number(line, full, value);
        else if (full == "tolerances.iso_variation")
            c.iso_variation = parse_number(line, full, value);
        else
            throw ConfigError(line, "unknown key '" + full + "'");
    }
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(line, std::string("invalid configuration: ") + e.what());
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string render_config(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "[grid]\n";
    out << "d = " << c.d << "\n";
    out << "n = " << c.n << "\n";
    out << "L = " << format_double(c.L) << "\n";
    out << "pad = " << c.pad << "\n";
    out << "[datum]\n";
    out << "family = " << c.family << "\n";
    out << "amplitude = " << format_double(c.amplitude) << "\n";
    out << "width = " << format_double(c.width) << "\n";
    out << "center_x = " << format_double(c.center[0]) << "\n";
    out << "center_y = " << format_double(c.center[1]) << "\n";
    out << "center_z = " << format_double(c.center[2]) << "\n";
    out << "[time]\n";
    out << "t_end = " << format_double(c.t_end) << "\n";
    out << "dt = " << format_double(c.dt) << "\n";
    out << "record_at = " << join_numbers(c.record_at) << "\n";
    out << "[probe]\n";
    out << "rays = " << c.rays << "\n";
    out << "delta_deg = " << format_double(c.delta_deg) << "\n";
    out << "r_min = " << format_double(c.r_min) << "\n";
    out << "r_max = " << format_double(c.r_max) << "\n";
    out << "n_radii = " << c.n_radii << "\n";
    out << "component = " << c.component << "\n";
    out << "[directions]\n";
    out << "k11 = " << format_double(c.k11) << "\n";
    out << "k12 = " << format_double(c.k12) << "\n";
    out << "k22 = " << format_double(c.k22) << "\n";
    out << "[peetre]\n";
    out << "weight_family = " << c.weight_family << "\n";
    out << "alpha_x = " << format_double(c.weight_alpha[0]) << "\n";
    out << "alpha_y = " << format_double(c.weight_alpha[1]) << "\n";
    out << "alpha_z = " << format_double(c.weight_alpha[2]) << "\n";
    out << "rate = " << format_double(c.weight_rate) << "\n";
    out << "times = " << join_numbers(c.peetre_times) << "\n";
    out << "[output]\n";
    out << "dir = " << c.out_dir << "\n";
    out << "[random]\n";
    out << "seed = " << c.seed << "\n";
    out << "[suite]\n";
    out << "names = " << join(c.suites) << "\n";
    out << "[tolerances]\n";
    out << "profile_rel = " << format_double(c.profile_rel) << "\n";
    out << "exponent_slack = " << format_double(c.exponent_slack) << "\n";
    out << "lower_factor = " << format_double(c.lower_factor) << "\n";
    out << "upper_factor = " << format_double(c.upper_factor) << "\n";
    out << "exceptional_factor = " << format_double(c.exceptional_factor) << "\n";
    out << "pressure_rel = " << format_double(c.pressure_rel) << "\n";
    out << "iso_variation = " << format_double(c.iso_variation) << "\n";
    return out.str();
}

std::string format_double(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << join(header) << "\n";
    for (const std::vector<double>& row : rows) {
        if (row.size() != header.size())
            throw std::invalid_argument("write_csv: row width does not match header");
        out << join_numbers(row) << "\n";
    }
}

void write_snapshot(const std::string& path, const VectorField& u) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    double header[4] = {static_cast<double>(u.grid.d), static_cast<double>(u.grid.n), u.grid.L,
                        u.time};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    for (int c = 0; c < u.grid.d; ++c)
        out.write(reinterpret_cast<const char*>(u.comp[c].data()),
                  static_cast<std::streamsize>(u.comp[c].size() * sizeof(double)));

    nlohmann::json meta;
    meta["d"] = u.grid.d;
    meta["n"] = u.grid.n;
    meta["L"] = u.grid.L;
    meta["time"] = u.time;
    meta["layout"] = "header{d,n,L,time} then components, row-major, little-endian f64";
    std::ofstream mout(path + ".json", std::ios::binary);
    mout << meta.dump(2) << "\n";
}

VectorField read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    double header[4];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!in) throw std::runtime_error("snapshot '" + path + "' truncated");
    GridSpec g;
    g.d = static_cast<int>(header[0]);
    g.n = static_cast<int>(header[1]);
    g.L = header[2];
    g.validate();
    VectorField u(g);
    u.time = header[3];
    for (int c = 0; c < g.d; ++c) {
        in.read(reinterpret_cast<char*>(u.comp[c].data()),
                static_cast<std::streamsize>(u.comp[c].size() * sizeof(double)));
        if (!in) throw std::runtime_error("snapshot '" + path + "' truncated");
    }
    return u;
}

void write_energy_csv(const std::string& path, const std::vector<EnergySample>& series) {
    if (series.empty()) throw std::invalid_argument("write_energy_csv: empty series");
    int d = series.front().E.dim();
    std::vector<std::string> header{"t"};
    for (int h = 0; h < d; ++h)
        for (int k = h; k < d; ++k)
            header.push_back("e" + std::to_string(h + 1) + std::to_string(k + 1));
    std::vector<std::vector<double>> rows;
    rows.reserve(series.size());
    for (const EnergySample& s : series) {
        std::vector<double> row{s.t};
        for (int h = 0; h < d; ++h)
            for (int k = h; k < d; ++k) row.push_back(s.E.at(h, k));
        rows.push_back(std::move(row));
    }
    write_csv(path, header, rows);
}

AssertionLine check_le(const std::string& name, const std::string& anchor, double value,
                       double bound) {
    return {name, anchor, value, "<=", bound, 0.0, value <= bound};
}

AssertionLine check_ge(const std::string& name, const std::string& anchor, double value,
                       double bound) {
    return {name, anchor, value, ">=", bound, 0.0, value >= bound};
}

AssertionLine check_in(const std::string& name, const std::string& anchor, double value, double lo,
                       double hi) {
    return {name, anchor, value, "in", lo, hi, value >= lo && value <= hi};
}

std::string format_assertion(const AssertionLine& a) {
    char value[40], b1[40], b2[40];
    std::snprintf(value, sizeof(value), "%.6g", a.value);
    std::snprintf(b1, sizeof(b1), "%.6g", a.bound);
    std::snprintf(b2, sizeof(b2), "%.6g", a.bound_hi);
    char line[256];
    if (a.op == "in")
        std::snprintf(line, sizeof(line), "%s  %-28s %12s in [%s, %s]  %s",
                      a.pass ? "PASS" : "FAIL", a.name.c_str(), value, b1, b2, a.anchor.c_str());
    else
        std::snprintf(line, sizeof(line), "%s  %-28s %12s %s %s  %s", a.pass ? "PASS" : "FAIL",
                      a.name.c_str(), value, a.op.c_str(), b1, a.anchor.c_str());
    return line;
}

}  // namespace nsff
