#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>

#include <json.hpp>

#include "ecgl/config.hpp"
#include "ecgl/io.hpp"

using namespace ecgl;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("ecgl-test-" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::vector<DiagnosticsRecord> sample_records() {
    std::vector<DiagnosticsRecord> recs;
    for (int i = 0; i < 5; ++i) {
        DiagnosticsRecord r;
        r.t = 0.1 * i + 1e-17; // exercise full precision
        r.mass = 1.0 / 3.0 + i;
        r.kinetic = 2.0 / 7.0 * (i + 1);
        r.potential = 1e-300 * (i + 1); // subnormal-adjacent magnitudes survive
        r.energy = -5.0 / 11.0 + i;
        r.k_functional = 1.0 / 9.0 - i;
        r.s_accumulator = 1e8 + i;
        r.sup_abs = 0.999999999999999 + i;
        r.boundary_mass_fraction = 1e-9 * i;
        if (i % 2 == 0) {
            BubbleFit b;
            b.lambda = 0.75 + 0.01 * i;
            b.center = {0.5, -1.25, 2.0 + i, 0.0};
            b.correlation = 0.99;
            r.bubble = b;
        }
        recs.push_back(r);
    }
    return recs;
}

} // namespace

TEST_CASE("config: empty document yields the documented defaults") {
    auto cfg = parse_config_text("{}");
    CHECK(cfg.grid.d == 3);
    CHECK(cfg.grid.n_per_axis == 64);
    CHECK(cfg.grid.half_length == 2.5);
    CHECK(cfg.theta == doctest::Approx(0.7853981633974483).epsilon(1e-16));
    CHECK(cfg.stepper.dt == 1e-3);
    CHECK(cfg.stepper.blowup_sup_threshold == 1e6);
    CHECK(cfg.stepper.blowup_kinetic_factor == 25.0);
    CHECK(cfg.stepper.decay_h1_threshold == 1e-6);
    CHECK(cfg.stepper.max_time == 20.0);
    CHECK(cfg.output.record_cadence == 10);
}

TEST_CASE("config: emit round-trips through parse") {
    RunConfig cfg;
    cfg.grid.n_per_axis = 48;
    cfg.grid.half_length = 8.0;
    cfg.theta = 1.0;
    cfg.stepper.dt = 5e-4;
    cfg.experiment.kind = ExperimentKind::InviscidLimit;
    cfg.experiment.family = InitialFamily::Ring;
    cfg.experiment.amplitudes = {0.25, 0.5};
    cfg.experiment.thetas = {0.5, 1.2};
    cfg.experiment.seed = 99;
    cfg.experiment.m_list = {3, 4};
    cfg.output.directory = "elsewhere";

    auto back = parse_config_text(emit_config(cfg));
    CHECK(back.grid.n_per_axis == 48);
    CHECK(back.grid.half_length == 8.0);
    CHECK(back.theta == 1.0);
    CHECK(back.stepper.dt == 5e-4);
    CHECK(back.experiment.kind == ExperimentKind::InviscidLimit);
    CHECK(back.experiment.family == InitialFamily::Ring);
    CHECK(back.experiment.amplitudes == std::vector<double>{0.25, 0.5});
    CHECK(back.experiment.thetas == std::vector<double>{0.5, 1.2});
    CHECK(back.experiment.seed == 99);
    CHECK(back.experiment.m_list == std::vector<int>{3, 4});
    CHECK(back.output.directory == "elsewhere");
}

TEST_CASE("config: unknown keys are fatal") {
    CHECK_THROWS_AS(parse_config_text(R"({"gird": {}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"grid": {"n": 64}})"), ConfigError);
    try {
        parse_config_text(R"({"stepper": {"dt_max": 1.0}})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(e.violations.size() == 1);
        CHECK(e.violations[0].find("dt_max") != std::string::npos);
    }
}

TEST_CASE("config: every violation is collected, not just the first") {
    try {
        parse_config_text(
            R"({"grid": {"d": 5, "n_per_axis": 7}, "z": {"theta": 2.0}, "bogus": 1})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.violations.size() == 4);
    }
}

TEST_CASE("config: range and type validation") {
    CHECK_THROWS_AS(parse_config_text(R"({"z": {"theta": 0.0}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"z": {"theta": -0.3}})"), ConfigError);
    CHECK_NOTHROW(parse_config_text(R"({"z": {"theta": 1.5707963267948966}})"));
    CHECK_THROWS_AS(parse_config_text(R"({"grid": {"n_per_axis": 63}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"stepper": {"dt": "fast"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"stepper": {"dt": 1e-12}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"experiment": {"amplitudes": []}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"experiment": {"kind": "blowup"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("not json"), ConfigError);
    // truncated W support must fit inside the box
    CHECK_THROWS_AS(parse_config_text(
                        R"({"grid": {"half_length": 2.0},
                            "experiment": {"family": "truncated_w",
                                           "cutoff_radius": 1.5, "taper_width": 0.6}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config("/nonexistent/path/config.json"), ConfigError);
}

TEST_CASE("time series: bit-exact round trip including absent bubbles") {
    TempDir dir;
    const auto recs = sample_records();
    const auto path = dir.file("series.csv");
    write_time_series(path, recs);

    {
        std::ifstream in(path);
        std::string header;
        std::getline(in, header);
        CHECK(header ==
              "t,mass,kinetic,potential,energy,K,s_accum,sup_abs,"
              "bubble_lambda,bubble_cx,bubble_cy,bubble_cz,boundary_mass_frac");
    }

    const auto back = read_time_series(path);
    REQUIRE(back.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        CHECK(back[i].t == recs[i].t);
        CHECK(back[i].mass == recs[i].mass);
        CHECK(back[i].kinetic == recs[i].kinetic);
        CHECK(back[i].potential == recs[i].potential);
        CHECK(back[i].energy == recs[i].energy);
        CHECK(back[i].k_functional == recs[i].k_functional);
        CHECK(back[i].s_accumulator == recs[i].s_accumulator);
        CHECK(back[i].sup_abs == recs[i].sup_abs);
        CHECK(back[i].boundary_mass_fraction == recs[i].boundary_mass_fraction);
        CHECK(back[i].bubble.has_value() == recs[i].bubble.has_value());
        if (recs[i].bubble) {
            CHECK(back[i].bubble->lambda == recs[i].bubble->lambda);
            for (int a = 0; a < 3; ++a)
                CHECK(back[i].bubble->center[a] == recs[i].bubble->center[a]);
        }
    }
}

TEST_CASE("time series: streaming writer produces the same file") {
    TempDir dir;
    const auto recs = sample_records();
    write_time_series(dir.file("bulk.csv"), recs);
    {
        TimeSeriesWriter w(dir.file("stream.csv"));
        for (const auto& r : recs) w.write(r);
    }
    std::ifstream a(dir.file("bulk.csv")), b(dir.file("stream.csv"));
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
}

TEST_CASE("time series: header mismatch is rejected") {
    TempDir dir;
    const auto path = dir.file("bad.csv");
    std::ofstream(path) << "t,mass\n0,1\n";
    CHECK_THROWS_AS(read_time_series(path), std::runtime_error);
    CHECK_THROWS_AS(read_time_series(dir.file("missing.csv")), std::runtime_error);
}

TEST_CASE("checkpoint: exact round trip") {
    TempDir dir;
    auto grid = std::make_shared<Grid>(3, 8, 4.0);
    Checkpoint cp;
    cp.d = 3;
    cp.n_per_axis = 8;
    cp.half_length = 4.0;
    cp.theta = 1.1;
    cp.state.t = 0.123456789012345678;
    cp.state.t_event = 0.5;
    cp.state.step_index = 4242;
    cp.state.status = RunStatus::MaxTimeReached;
    cp.state.u = ComplexField(grid, Space::physical);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    for (auto& v : cp.state.u.values) v = {g(rng), g(rng)};

    const auto path = dir.file("state.ckpt");
    write_checkpoint(path, cp);
    const auto back = read_checkpoint(path);
    CHECK(back.d == cp.d);
    CHECK(back.n_per_axis == cp.n_per_axis);
    CHECK(back.half_length == cp.half_length);
    CHECK(back.theta == cp.theta);
    CHECK(back.state.t == cp.state.t);
    CHECK(back.state.t_event == cp.state.t_event);
    CHECK(back.state.step_index == cp.state.step_index);
    CHECK(back.state.status == cp.state.status);
    REQUIRE(back.state.u.values.size() == cp.state.u.values.size());
    for (std::size_t i = 0; i < cp.state.u.values.size(); ++i)
        CHECK(back.state.u.values[i] == cp.state.u.values[i]);
}

TEST_CASE("checkpoint: corrupt files are rejected") {
    TempDir dir;
    const auto bad = dir.file("bad.ckpt");
    std::ofstream(bad, std::ios::binary) << "NOTACKPTxxxxxxxxxxxxxxxx";
    CHECK_THROWS_AS(read_checkpoint(bad), std::runtime_error);

    // valid header, truncated payload
    auto grid = std::make_shared<Grid>(3, 8, 4.0);
    Checkpoint cp;
    cp.n_per_axis = 8;
    cp.half_length = 4.0;
    cp.state.u = ComplexField(grid, Space::physical);
    const auto path = dir.file("trunc.ckpt");
    write_checkpoint(path, cp);
    fs::resize_file(path, fs::file_size(path) / 2);
    CHECK_THROWS_AS(read_checkpoint(path), std::runtime_error);

    CHECK_THROWS_AS(read_checkpoint(dir.file("absent.ckpt")), std::runtime_error);
}

TEST_CASE("manifest: effective config, version, command line") {
    TempDir dir;
    RunConfig cfg;
    const auto path = dir.file("manifest.json");
    write_manifest(path, emit_config(cfg), "ecgl run --config c.json", 12.5);

    std::ifstream in(path);
    const auto m = nlohmann::json::parse(in);
    CHECK(m.at("command_line") == "ecgl run --config c.json");
    CHECK(m.at("wall_seconds") == 12.5);
    CHECK(m.at("version").get<std::string>().find("ecgl") == 0);
    CHECK(m.at("config").at("grid").at("n_per_axis") == 64);
    // manifest config text reparses cleanly
    CHECK_NOTHROW(parse_config_text(m.at("config").dump()));
}
