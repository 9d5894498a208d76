#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

#include "cuspflow/config.hpp"
#include "cuspflow/error.hpp"
#include "cuspflow/pipeline.hpp"

using namespace cuspflow;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("cuspflow_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

// Short coarse run; the certificate only supplies the bounds that are logged.
RunConfig short_run() {
    RunConfig c;
    c.sim.h = 0.05;
    c.sim.dt = 0.02;
    c.sim.t_max = 0.1;
    c.sim.diagnostics_interval = 0.04;
    c.sim.snapshot_interval = 0.06;
    return c;
}

BlowupCertificate stub_certificate() {
    BlowupCertificate cert;
    cert.delta = 0.01;
    cert.speed_bound = 1e-8;
    cert.transit_bound = 5e8;
    return cert;
}

}  // namespace

TEST_CASE("config: defaults, partial files and round trip") {
    const RunConfig d = parse("{}");
    CHECK(d == RunConfig{});
    CHECK(d.domain.N == 2048);
    CHECK(d.sim.h == 0.02);
    CHECK(d.sim.dt == 0.005);
    CHECK(d.initial_data.profile == InitialData::Profile::ramp);

    const RunConfig c = parse(R"({"sim": {"h": 0.04, "dt": 0.01}, "initial_data": {"profile": "interior"},
                                  "rng_seed": 7, "output_dir": "runs/a"})");
    CHECK(c.sim.h == 0.04);
    CHECK(c.sim.t_max == RunConfig{}.sim.t_max);
    CHECK(c.initial_data.profile == InitialData::Profile::interior);
    CHECK(c.rng_seed == 7);

    const RunConfig again = parse(serialize_config(c));
    CHECK(again == c);
    CHECK(serialize_config(again) == serialize_config(c));
}

TEST_CASE("config: invalid input is rejected") {
    CHECK_THROWS_AS(parse("{"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"sim": {"h": 0.06}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"sim": {"dt": 0}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"sim": {"t_max": -1}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"initial_data": {"delta": 0.2}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"initial_data": {"a0": 0.6}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"initial_data": {"profile": "bump"}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"domain": {"N": 1001}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"grids": {"kappa_boundary": 10}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"simulation": {}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"sim": {"H": 0.02}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"sim": {"h": "fine"}})"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("oracle suite passes") {
    for (const auto& k : run_oracle_suite(RunConfig{})) {
        INFO(k.name);
        CHECK(k.passed());
    }
}

TEST_CASE("simulate: artifacts, invariants and byte-identical reruns") {
    const RunConfig c = short_run();
    const fs::path a = scratch_dir("run_a");
    const fs::path b = scratch_dir("run_b");
    std::ostringstream log;
    const RunSummary s = simulate(c, stub_certificate(), a, log);
    simulate(c, stub_certificate(), b, log);

    CHECK_FALSE(s.aborted());
    CHECK(s.steps == 5);
    CHECK(s.sup_w_drift == 0.0);
    CHECK(s.circulation_drift == 0.0);
    CHECK(s.superlevel_min >= 0.01);
    CHECK(s.finite_speed);
    CHECK(s.finite_speed_times >= 1);
    CHECK(s.speed_ratio_min > 1.0);
    CHECK(s.negative_speed_flags == 0);
    CHECK(s.osc_initial == 0.0);
    CHECK(s.transit.monotone);
    CHECK_FALSE(s.transit.reached);  // far too short to arrive
    CHECK(s.trajectory.size() == 6);
    CHECK(s.records.front().t == 0.0);
    CHECK(s.records.back().t == doctest::Approx(0.1));

    for (const char* f : {"config.json", "trajectory.csv", "invariants.csv", "oscillation.csv", "diagnostics.csv",
                          "transit.json", "run_summary.json", "snapshots/snapshot_000000.csv",
                          "snapshots/snapshot_000003.csv", "snapshots/snapshot_000005.csv"}) {
        INFO(f);
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }
    CHECK(parse(slurp(a / "config.json")) == c);

    std::ostringstream rep;
    CHECK(cmd_report({a}, rep) == kExitCheckFailed);  // no certificate.json in the run directory
    CHECK(rep.str().find("missing files: certificate.json") != std::string::npos);
    CHECK(rep.str().find("inconclusive") != std::string::npos);
    CHECK(fs::exists(a / "report.txt"));
}

TEST_CASE("run requires a matching certificate") {
    RunConfig c = short_run();
    const fs::path d = scratch_dir("gate");
    std::ostringstream log;
    CHECK(cmd_run(c, d, log) == kExitBadInput);

    BlowupCertificate cert;
    cert.delta = 0.02;
    cert.kappa = 1e-6;
    cert.epsilon = 1e-4;
    cert.epsilon_max = 2e-4;
    cert.speed_bound = cert.epsilon * cert.delta * cert.delta;
    cert.transit_arclength = 5.1375;
    cert.transit_bound = cert.transit_arclength / cert.speed_bound;
    cert.r = 1.0;
    cert.beta = 0.1;
    cert.M = 4096;
    cert.N = 2048;
    auto write = [&](const BlowupCertificate& k) {
        std::ofstream out(d / "certificate.json");
        write_certificate(out, k);
    };
    write(cert);
    CHECK(cmd_run(c, d, log) == kExitBadInput);
    CHECK(log.str().find("different domain or delta") != std::string::npos);

    cert.delta = 0.01;
    cert.kappa = 0.0;
    write(cert);
    CHECK(cmd_run(c, d, log) == kExitBadInput);
    CHECK(log.str().find("refusing certificate") != std::string::npos);
}

TEST_CASE("report: missing directory, partial and side-by-side") {
    std::ostringstream log;
    CHECK(cmd_report({}, log) == kExitBadInput);
    CHECK(cmd_report({"/nonexistent/run"}, log) == kExitBadInput);

    const fs::path a = scratch_dir("report_a");
    const fs::path b = scratch_dir("report_b");
    for (const fs::path& d : {a, b}) {
        std::ofstream(d / "transit.json") << R"({"T": 8.0, "bound": 3.7e8, "reached": true, "success": true})";
    }
    std::ofstream(b / "transit.json") << R"({"T": 8.2, "bound": 3.7e8, "reached": true, "success": true})";
    std::ostringstream one;
    CHECK(cmd_report({a}, one) == kExitCheckFailed);
    CHECK(one.str().find("trajectory.csv") != std::string::npos);
    CHECK(one.str().find("T = 8") != std::string::npos);

    std::ostringstream two;
    cmd_report({a, b}, two);
    CHECK(two.str().find("relative change in T: 2.439%") != std::string::npos);
}
