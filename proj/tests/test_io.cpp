#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "nsff/io.hpp"
#include "nsff/solver.hpp"

using nsff::ExperimentConfig;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("config defaults parse, round-trip, and validate") {
    ExperimentConfig def;
    CHECK_NOTHROW(def.validate());

    std::string text = nsff::render_config(def);
    ExperimentConfig back = nsff::parse_config(text);
    CHECK(back.n == def.n);
    CHECK(back.L == def.L);
    CHECK(back.dt == def.dt);
    CHECK(back.family == def.family);
    CHECK(back.record_at == def.record_at);
    CHECK(back.suites == def.suites);
    CHECK(back.seed == def.seed);
    CHECK(nsff::render_config(back) == text);
}

TEST_CASE("config parser reports precise line diagnostics") {
    auto line_of = [](const std::string& text) {
        try {
            nsff::parse_config(text);
        } catch (const nsff::ConfigError& e) {
            return e.line();
        }
        return -1;
    };

    CHECK(line_of("[grid]\nn = 256\nbogus = 1\n") == 3);
    CHECK(line_of("[grid]\nn = twelve\n") == 2);
    CHECK(line_of("[nonsense]\n") == 1);
    CHECK(line_of("n = 256\n") == 1);
    CHECK(line_of("[grid]\nn 256\n") == 2);
    CHECK(line_of("[grid]\nn = 256\nn = 512\n") == 3);
    CHECK(line_of("[grid]\nn = 3.5\n") == 2);
    CHECK(line_of("# comment\n\n[grid]\nn = 100\n") == 4);  // not a power of two

    try {
        nsff::parse_config("[probe]\nr_max = 99\n");
        CHECK(false);
    } catch (const nsff::ConfigError& e) {
        CHECK(std::string(e.what()).find("r_max") != std::string::npos);
    }
}

TEST_CASE("format_double round-trips and CSV output is deterministic") {
    for (double v : {0.0, 1.0, -3.5, 0.1, 1.0 / 3.0, 6.02e23, -1.6e-19, 3.141592653589793}) {
        std::string s = nsff::format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }

    std::string path = "/tmp/nsff_test_io.csv";
    std::vector<std::string> header{"theta_deg", "r", "value", "predicted", "rel_err"};
    std::vector<std::vector<double>> rows{{30.0, 8.0, 1.0 / 3.0, 0.3333, 0.01},
                                          {90.0, 12.5, 2e-6, 1.9e-6, 0.05}};
    nsff::write_csv(path, header, rows);
    std::string first = slurp(path);
    nsff::write_csv(path, header, rows);
    CHECK(slurp(path) == first);
    CHECK(first.substr(0, first.find('\n')) == "theta_deg, r, value, predicted, rel_err");

    CHECK_THROWS_AS(nsff::write_csv(path, header, {{1.0, 2.0}}), std::invalid_argument);
    std::remove(path.c_str());
}

TEST_CASE("snapshot files round-trip bitwise") {
    nsff::GridSpec g{2, 32, 4.0};
    nsff::VectorField u(g);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            u.comp[0].at(i, j) = std::sin(0.3 * i) + j;
            u.comp[1].at(i, j) = 1.0 / (1.0 + i + 2.0 * j);
        }
    u.time = 0.375;

    std::string path = "/tmp/nsff_test_snapshot.bin";
    nsff::write_snapshot(path, u);
    nsff::VectorField back = nsff::read_snapshot(path);
    CHECK(back.grid == g);
    CHECK(back.time == u.time);
    bool identical = true;
    for (int c = 0; c < 2; ++c)
        for (std::size_t s = 0; s < u.comp[c].size(); ++s)
            identical = identical && (back.comp[c].data()[s] == u.comp[c].data()[s]);
    CHECK(identical);

    std::string meta = slurp(path + ".json");
    CHECK(meta.find("\"n\": 32") != std::string::npos);
    CHECK(meta.find("\"time\": 0.375") != std::string::npos);
    std::remove(path.c_str());
    std::remove((path + ".json").c_str());
}

TEST_CASE("energy CSV lists the upper triangle per sample") {
    std::vector<nsff::EnergySample> series{
        {0.0, nsff::SymMat::from_rows({{1.0, 0.25}, {0.25, 0.5}})},
        {0.5, nsff::SymMat::from_rows({{0.8, 0.2}, {0.2, 0.4}})}};
    std::string path = "/tmp/nsff_test_energy.csv";
    nsff::write_energy_csv(path, series);
    std::string text = slurp(path);
    CHECK(text == "t, e11, e12, e22\n0, 1, 0.25, 0.5\n0.5, 0.8, 0.2, 0.4\n");
    std::remove(path.c_str());
}

TEST_CASE("assertion lines carry anchors and render aligned") {
    nsff::AssertionLine ok = nsff::check_le("gshift_residual", "Lemma 2.2", 3.2e-9, 1e-6);
    CHECK(ok.pass);
    std::string line = nsff::format_assertion(ok);
    CHECK(line.find("PASS") == 0);
    CHECK(line.find("Lemma 2.2") != std::string::npos);
    CHECK(line.find("<= 1e-06") != std::string::npos);

    nsff::AssertionLine bad = nsff::check_ge("inf_factor", "Theorem 3.1, Eq. (lower-j)", 0.1, 0.25);
    CHECK(!bad.pass);
    CHECK(nsff::format_assertion(bad).find("FAIL") == 0);

    nsff::AssertionLine span =
        nsff::check_in("u_tangential_exponent", "Prop. 3.8, Eq. (boundQ-j)", -3.05, -3.2, -2.8);
    CHECK(span.pass);
    CHECK(nsff::format_assertion(span).find("in [-3.2, -2.8]") != std::string::npos);
}
