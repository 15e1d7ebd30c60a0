#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

std::string in(const std::string& fixture) { return "--input \"" + testing::fixture_path(fixture) + "\""; }

std::string out(const fs::path& dir) { return " --out \"" + dir.string() + "\""; }

fs::path write_temp(const std::string& name, const std::string& body) {
    const auto p = fs::temp_directory_path() / ("incred_cli_" + name);
    std::ofstream(p) << body;
    return p;
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(testing::slurp(p)); }

}  // namespace

TEST_CASE("cli: usage errors exit 2") {
    CHECK(testing::run_cli("") == 2);
    CHECK(testing::run_cli("frobnicate " + in("example1")) == 2);
    CHECK(testing::run_cli("reduce") == 2);
    CHECK(testing::run_cli("reduce " + in("example1") + " --bogus") == 2);
    CHECK(testing::run_cli("simulate " + in("example2") + " --strategy fastest") == 2);
    CHECK(testing::run_cli("reduce " + in("example2") + " --point 1,2,3,4") == 2);
    CHECK(testing::run_cli("--help") == 0);
}

TEST_CASE("cli: input parse errors exit 2") {
    const auto bad_json = write_temp("bad.json", R"({"name": "x", "n": 1,)");
    const auto bad_dsl = write_temp("dsl.json", R"({"name": "x", "n": 1,
      "F": [{"guard": "otherwise", "value": ["{x1 +}"]}], "domain": {"lo": [-1], "hi": [1]}})");
    for (const char* cmd : {"reduce", "deriv", "certify", "invariance", "matrosov", "simulate", "validate-gradient"}) {
        CAPTURE(cmd);
        CHECK(testing::run_cli(std::string(cmd) + " --input \"" + bad_json.string() + "\"") == 2);
        CHECK(testing::run_cli(std::string(cmd) + " --input \"" + bad_dsl.string() + "\"") == 2);
        CHECK(testing::run_cli(std::string(cmd) + " --input /nonexistent.json") == 2);
    }
}

TEST_CASE("cli: semantic errors exit 3") {
    const auto no_catch_all = write_temp("sem.json", R"({"name": "x", "n": 1,
      "F": [{"guard": "x1 > 0", "value": ["{1}"]}], "domain": {"lo": [-1], "hi": [1]}})");
    for (const char* cmd : {"reduce", "deriv", "certify", "invariance", "matrosov", "simulate", "validate-gradient"}) {
        CAPTURE(cmd);
        CHECK(testing::run_cli(std::string(cmd) + " --input \"" + no_catch_all.string() + "\"") == 3);
    }
    // Missing blocks or V for the requested analysis.
    CHECK(testing::run_cli("certify " + in("smooth_u")) == 3);
    CHECK(testing::run_cli("matrosov " + in("example2")) == 3);
    CHECK(testing::run_cli("invariance " + in("example4")) == 3);
    const auto no_v = write_temp("nov.json", R"({"name": "x", "n": 1,
      "F": [{"guard": "otherwise", "value": ["{-x1}"]}], "domain": {"lo": [-1], "hi": [1]},
      "simulate": {"x0": [0.5], "strategy": "reduced-descent"}})");
    CHECK(testing::run_cli("deriv --input \"" + no_v.string() + "\"") == 3);
    CHECK(testing::run_cli("simulate --input \"" + no_v.string() + "\"") == 3);
}

TEST_CASE("cli: reduce") {
    const auto dir = testing::scratch("reduce");
    REQUIRE(testing::run_cli("reduce " + in("example1") + out(dir)) == 0);
    const auto csv = testing::slurp(dir / "reduction.csv");
    CHECK(csv.find("-1,0,-2,5,0,0,0\n") != std::string::npos);
    CHECK(csv.find("0,0,-2,-2,nan,nan,1\n") != std::string::npos);
    CHECK(fs::exists(dir / "reduction.txt"));
    CHECK(testing::run_cli("reduce " + in("smooth_u") + " --grid 5" + out(dir)) == 0);
}

TEST_CASE("cli: deriv") {
    const auto dir = testing::scratch("deriv");
    REQUIRE(testing::run_cli("deriv " + in("example2") + " --point 1,1 --point 0.5,0.5" + out(dir)) == 0);
    const auto csv = testing::slurp(dir / "deriv.csv");
    CHECK(csv.find("1,1,0,-inf,1,0,") != std::string::npos);
    CHECK(csv.find("0.5,0.5,0,-0.5,0,-0.5,") != std::string::npos);
}

TEST_CASE("cli: certify exit codes") {
    const auto dir = testing::scratch("certify");
    CHECK(testing::run_cli("certify " + in("example2") + out(dir)) == 0);
    CHECK(read_json(dir / "certificate.json")["verdict"] == "CERTIFIED");
    CHECK(testing::run_cli("certify " + in("trivial_zero") + out(dir)) == 0);
    CHECK(testing::run_cli("certify " + in("example2_baseline") + out(dir)) == 1);
    const auto j = read_json(dir / "certificate.json");
    CHECK(j["verdict"] == "VIOLATED");
    CHECK(j["worst_point"]["x"][0].get<double>() == -1.0);
    CHECK(testing::run_cli("certify " + in("example2") + " --baseline" + out(dir)) == 1);
}

TEST_CASE("cli: invariance") {
    const auto dir = testing::scratch("invariance");
    REQUIRE(testing::run_cli("invariance " + in("example3") + out(dir)) == 0);
    const auto j = read_json(dir / "invariance.json");
    CHECK(j["candidates"][0]["equilibrium"] == true);
    CHECK(j["candidates"][1]["equilibrium"] == false);
}

TEST_CASE("cli: matrosov exit codes") {
    const auto dir = testing::scratch("matrosov");
    CHECK(testing::run_cli("matrosov " + in("example6") + out(dir)) == 0);
    const auto j = read_json(dir / "matrosov.json");
    CHECK(j["chain"]["verdict"] == "CERTIFIED");
    CHECK(j["constants"]["K"].size() == 1);
    CHECK(testing::run_cli("matrosov " + in("matrosov_m1") + out(dir)) == 0);
    CHECK(testing::run_cli("matrosov " + in("matrosov_broken") + out(dir)) == 1);
    CHECK(read_json(dir / "matrosov.json")["chain"]["worst_point"].is_object());
    CHECK(testing::run_cli("matrosov " + in("matrosov_adversarial") + out(dir)) == 1);
    CHECK(read_json(dir / "matrosov.json")["verdict"] == "INCONCLUSIVE");
}

TEST_CASE("cli: simulate") {
    const auto dir = testing::scratch("simulate");
    REQUIRE(testing::run_cli("simulate " + in("example2") + out(dir)) == 0);
    const auto j = read_json(dir / "report.json");
    CHECK(std::abs(j["final_norm"].get<double>() - 4.765e-3) < 5e-4);
    CHECK(j["membership"]["violations"] == 0);
    CHECK(testing::run_cli("simulate " + in("trivial_zero") + out(dir)) == 0);
    // T = 1 is too short for the tail of |x|^2 to fall below 1e-3.
    CHECK(testing::run_cli("simulate " + in("example2") + " --x0 0.5,0.5 --h 0.01 --T 1" + out(dir)) == 1);
    const auto short_run = read_json(dir / "report.json");
    CHECK(short_run["steps"] == 100);
    CHECK(short_run["membership"]["verdict"] == "PASS");
    CHECK(short_run["convergence"]["verdict"] == "FAIL");
    CHECK(testing::run_cli("simulate " + in("smooth_u") + out(dir)) == 2);
}

TEST_CASE("cli: validate-gradient") {
    const auto dir = testing::scratch("validate");
    CHECK(testing::run_cli("validate-gradient " + in("example6") + out(dir)) == 0);
    CHECK(testing::run_cli("validate-gradient " + in("example1") + " --function U --point 1 --radius 0.05" + out(dir)) == 0);
    CHECK(testing::run_cli("validate-gradient " + in("example1") + " --function nope" + out(dir)) == 3);
    // A smooth V at a coarse radius shows the gradient drift as a failure.
    CHECK(testing::run_cli("validate-gradient " + in("example2") + " --function V --radius 0.05" + out(dir)) == 1);
}

TEST_CASE("cli: reruns are byte-identical") {
    struct Run {
        std::string args;
        std::vector<std::string> files;
    };
    const std::vector<Run> runs{
        {"reduce " + in("example3"), {"reduction.csv", "reduction.txt"}},
        {"deriv " + in("example4"), {"deriv.csv"}},
        {"certify " + in("example4"), {"certificate.json", "certificate.txt"}},
        {"invariance " + in("example3"), {"invariance.json"}},
        {"matrosov " + in("example6"), {"matrosov.json"}},
        {"simulate " + in("example2") + " --strategy random-extreme --seed 11 --T 1", {"trajectory.csv", "report.json"}},
        {"validate-gradient " + in("example2"), {"gradients.json"}},
    };
    for (const auto& r : runs) {
        const auto a = testing::scratch("rerun_a");
        const auto b = testing::scratch("rerun_b");
        CAPTURE(r.args);
        ::setenv("INCRED_THREADS", "1", 1);
        const int first = testing::run_cli(r.args + out(a));
        ::setenv("INCRED_THREADS", "4", 1);
        const int second = testing::run_cli(r.args + out(b));
        ::unsetenv("INCRED_THREADS");
        REQUIRE(first == second);
        for (const auto& f : r.files) {
            CAPTURE(f);
            const auto x = testing::slurp(a / f);
            CHECK_FALSE(x.empty());
            CHECK(x == testing::slurp(b / f));
        }
    }
}
