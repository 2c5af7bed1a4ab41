#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "gammagibbs/config.hpp"
#include "gammagibbs/io.hpp"

using namespace gammagibbs;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinRel;

namespace {

std::string config_error(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("sample dumps round-trip bit-exactly", "[io]") {
    const CubeGrid grid(2, 1.0, 1.0);
    const auto w = Window::centered_block(grid, 2);
    Rng rng(1);
    std::vector<DiscreteMeasure> samples;
    for (int i = 0; i < 50; ++i) samples.push_back(sample_gamma_measure(LevySpec::gamma(0.7, 1e-6), w, rng));
    samples.emplace_back(2);  // an empty sample leaves no rows

    std::stringstream ss;
    write_samples_csv(ss, samples, 2);
    std::istringstream in(ss.str());
    const auto back = read_samples_csv(in, samples.size());
    REQUIRE(back.size() == samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) CHECK(back[i] == samples[i]);

    std::stringstream again;
    write_samples_csv(again, back, 2);
    CHECK(again.str() == ss.str());

    std::istringstream bad("sample_id,atom_id,x_1,mark\n0,0,abc,1\n");
    CHECK_THROWS_AS(read_samples_csv(bad), FormatError);
}

TEST_CASE("metadata round-trip", "[io]") {
    SampleMetadata m;
    m.theta = 2.5;
    m.trunc = 1e-6;
    m.dimension = 2;
    m.window = "block";
    m.window_lo = {-1.0, -0.5};
    m.window_hi = {1.0, 0.5};
    m.seed = 18446744073709551557ull;
    m.n_samples = 12;
    m.generator = "gibbs";
    m.timestamp = "2026-01-01T00:00:00Z";
    const auto back = parse_metadata_json(metadata_json(m));
    CHECK(back.theta == m.theta);
    CHECK(back.trunc == m.trunc);
    CHECK(back.dimension == 2);
    CHECK(back.window_lo == m.window_lo);
    CHECK(back.window_hi == m.window_hi);
    CHECK(back.seed == m.seed);
    CHECK(back.n_samples == 12);
    CHECK(back.generator == "gibbs");
    CHECK(back.timestamp == m.timestamp);
}

TEST_CASE("report JSON round-trip", "[io]") {
    SuiteReport rep;
    rep.suite = "free-measure";
    CheckReport a;
    a.name = "laplace";
    a.lhs = {0.5001, 0.0011, 1e5, 100000};
    a.rhs = Estimate::exact(0.5);
    a.diff = 1e-4;
    a.diff_se = 0.0011;
    a.bias_budget = 3e-7;
    a.note = "quoted \"note\"";
    finalize(a);
    CheckReport b = a;
    b.name = "control";
    b.negative_control = true;
    b.diff_se = 0.0;
    finalize(b);
    rep.checks = {a, b};

    const auto text = report_json(rep, 99);
    CHECK_THAT(text, ContainsSubstring("\"schema\""));
    const auto back = parse_report_json(text);
    CHECK(back.suite == rep.suite);
    REQUIRE(back.checks.size() == 2);
    CHECK(back.checks[0].name == "laplace");
    CHECK(back.checks[0].lhs.mean == a.lhs.mean);
    CHECK(back.checks[0].diff_se == a.diff_se);
    CHECK(back.checks[0].note == a.note);
    CHECK(back.checks[0].pass == a.pass);
    CHECK(back.checks[1].negative_control);
    CHECK(back.all_pass() == rep.all_pass());
    CHECK(report_json(back, 99) == text);
    CHECK_THAT(report_table(rep), ContainsSubstring("laplace"));

    CHECK_THROWS(parse_report_json("{\"schema\": \"other\", \"version\": 1}"));
}

TEST_CASE("minimal config fills defaults", "[config]") {
    const auto rc = parse_config_text(R"({"levy": {"theta": 1}, "grid": {"dimension": 1},
                                          "potential": {"family": "step", "A": 5}})");
    CHECK(rc.levy.theta() == 1.0);
    CHECK(rc.levy.trunc() == 1e-6);
    CHECK(rc.grid.delta() == 1.0);
    CHECK(rc.grid.range() == 1.0);
    CHECK(rc.potential.certified);
    CHECK(rc.potential.potential.family() == PotentialFamily::Step);
    CHECK(rc.potential.A_delta == 5.0);
    CHECK(rc.potential.include_diagonal);
    CHECK(rc.window.cubes().size() == 1);
    CHECK(rc.chain.n_steps == 100000);
    CHECK(rc.seed == 20240601);
    CHECK(rc.suites == std::vector<std::string>{"all"});
    const auto cc = rc.chain_config();
    CHECK(cc.burn_in == 20000);
    CHECK(cc.seed == rc.seed);

    const auto d = default_config();
    CHECK(d.potential.potential.family() == PotentialFamily::CoreShell);
    CHECK_THAT(d.potential.m_phi, WithinRel(4.0, 1e-14));
}

TEST_CASE("config sections", "[config]") {
    const auto rc = parse_config_text(R"({
        "levy": {"kind": "gamma", "theta": 2, "trunc": 1e-4},
        "grid": {"dimension": 2, "delta": 1, "range": 1},
        "potential": {"family": "core-shell", "A": 60, "b": 1, "include_diagonal": false},
        "window": {"lo": [0, 0], "hi": [1, 2]},
        "chain": {"n_steps": 5000, "burn_in": 100, "thinning": 5, "move_mix": {"birth": 0.3, "death": 0.3, "resize": 0.4}},
        "verify": {"n_samples": 1000},
        "seed": 5, "suites": ["bounds"], "out_dir": "/tmp/x"})");
    CHECK(rc.levy.theta() == 2.0);
    CHECK(rc.grid.dimension() == 2);
    CHECK_FALSE(rc.potential.include_diagonal);
    CHECK_FALSE(rc.window.is_cube_aligned());
    CHECK(rc.window.volume() == 2.0);
    CHECK(rc.chain_config().burn_in == 100);
    CHECK(rc.chain_config().move_mix.resize == 0.4);
    CHECK(rc.n_samples == 1000);
    CHECK(rc.out_dir == "/tmp/x");
    CHECK(rc.suite_config().seed == 5);
}

TEST_CASE("config errors name the offending key", "[config]") {
    const auto rc_msg = config_error(R"({"potential": {"family": "core-shell", "A": 7, "b": 1}})");
    CHECK_THAT(rc_msg, ContainsSubstring("repulsion_condition"));
    CHECK_THAT(rc_msg, ContainsSubstring("7"));
    CHECK_THAT(rc_msg, ContainsSubstring("8"));

    CHECK_THAT(config_error(R"({"seed": 1, "seed": 2})"), ContainsSubstring("duplicate key"));
    CHECK_THAT(config_error(R"({"seed": 1, "seed": 2})"), ContainsSubstring("seed"));
    CHECK_THAT(config_error(R"({"chain": {"thinning": 1, "thinning": 2}})"), ContainsSubstring("/chain/thinning"));
    CHECK_THAT(config_error(R"({"chain": {"thining": 3}})"), ContainsSubstring("/chain/thining"));
    CHECK_THAT(config_error(R"({"levy": {"kind": "stable"}})"), ContainsSubstring("/levy/kind"));
    CHECK_THAT(config_error(R"({"grid": {"delta": 1, "range": 0.5}})"), ContainsSubstring("/grid"));
    CHECK_THAT(config_error("{not json"), ContainsSubstring("parse error"));
    CHECK_THROWS_AS(parse_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("constants table on the default potential", "[io]") {
    const auto d = default_config();
    const auto t = constants_table(d.potential, 1.0, {}, {0.25, 0.5, 1.0}, {}, d.window);
    CHECK_THAT(t.constants.lambda0, WithinRel(6.0, 1e-12));
    CHECK_THAT(t.constants.m_phi, WithinRel(4.0, 1e-12));
    REQUIRE(t.log_C.size() == 3);
    for (const auto& v : t.log_C) CHECK(v.has_value());
    const auto text = constants_text(t);
    CHECK_THAT(text, ContainsSubstring("m_phi"));
    CHECK_THAT(text, ContainsSubstring("lambda0"));
    CHECK_THAT(constants_json(t), ContainsSubstring("\"lambda0\""));
}
