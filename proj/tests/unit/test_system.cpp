#include "doctest.h"

#include <string>

#include "incred/error.hpp"
#include "incred/system.hpp"
#include "support.hpp"

using incred::ParseError;
using incred::SemanticError;
using incred::parse_system;

namespace {

const char* kMinimal = R"({
  "name": "tiny", "n": 1,
  "F": [{"guard": "otherwise", "value": ["{-x1}"]}],
  "domain": {"lo": [-1], "hi": [1]}
})";

std::string message_of(const std::string& text) {
    try {
        parse_system(text);
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

std::string with(const std::string& key_value) {
    std::string s = kMinimal;
    s.insert(s.rfind('}'), ", " + key_value);
    return s;
}

}  // namespace

TEST_CASE("minimal system loads with defaults") {
    const auto sys = parse_system(kMinimal);
    CHECK(sys.name == "tiny");
    CHECK(sys.n == 1);
    CHECK_FALSE(sys.V.has_value());
    CHECK(sys.U.empty());
    CHECK(sys.grid.counts == std::vector<std::size_t>{21});
    CHECK(sys.grid.time_nodes == std::vector<double>{0.0});
    CHECK(sys.autonomous());
}

TEST_CASE("all fixtures load") {
    for (const char* name : {"example1", "example2", "example2_baseline", "example3", "example4", "example5",
                             "example6", "smooth_u", "trivial_zero", "matrosov_m1", "matrosov_broken",
                             "matrosov_adversarial"}) {
        CAPTURE(name);
        CHECK_NOTHROW(testing::fixture(name));
    }
    CHECK_FALSE(testing::fixture("example4").autonomous());
    CHECK(testing::fixture("example2").autonomous());
}

TEST_CASE("JSON syntax errors report the byte offset") {
    try {
        parse_system(R"({"name": "x", "n": 1,,})");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 21);
    }
}

TEST_CASE("unknown keys are rejected with their path") {
    CHECK_THROWS_AS(parse_system(with(R"("colour": 1)")), ParseError);
    CHECK(message_of(with(R"("colour": 1)")).find("colour") != std::string::npos);
    const std::string nested = R"({"name": "x", "n": 1,
      "F": [{"guard": "otherwise", "value": ["{0}"], "extra": 2}],
      "domain": {"lo": [-1], "hi": [1]}})";
    CHECK(message_of(nested).find("$.F[0]") != std::string::npos);
}

TEST_CASE("DSL errors keep the JSON path and the offset") {
    const std::string bad = R"({"name": "x", "n": 1,
      "F": [{"guard": "otherwise", "value": ["{x1 +}"]}],
      "domain": {"lo": [-1], "hi": [1]}})";
    try {
        parse_system(bad);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("$.F[0].value[0]") != std::string::npos);
        CHECK(e.offset() == 5);
    }
}

TEST_CASE("semantic errors") {
    CHECK_THROWS_AS(parse_system(R"({"name": "x", "n": 0, "F": [], "domain": {"lo": [], "hi": []}})"),
                    SemanticError);
    CHECK_THROWS_AS(parse_system(R"({"name": "x", "n": 1,
      "F": [{"guard": "x1 > 0", "value": ["{0}"]}],
      "domain": {"lo": [-1], "hi": [1]}})"),
                    SemanticError);
    CHECK_THROWS_AS(parse_system(R"({"name": "x", "n": 1,
      "F": [{"guard": "otherwise", "value": ["{0}"]}],
      "domain": {"lo": [1], "hi": [-1]}})"),
                    SemanticError);
    CHECK_THROWS_AS(parse_system(with(R"("grid": {"time": []})")), SemanticError);
    CHECK_THROWS_AS(parse_system(with(R"("probes": [[1, 2, 3]])")), SemanticError);
}

TEST_CASE("parameters resolve in file order") {
    const auto sys = parse_system(with(R"J("params": {"g": "0.5*exp(-t)", "h": "1 + g"})J"));
    REQUIRE(sys.symbols.params.size() == 2);
    CHECK(sys.symbols.find_param("h")->eval({{}, 0.0}) == 1.5);
    CHECK_THROWS_AS(parse_system(with(R"("params": {"h": "1 + g", "g": "t"})")), ParseError);
}

TEST_CASE("grid blocks accept scalar or per-axis forms") {
    const auto g = incred::parse_grid(R"({"counts": [3, 5], "include": [0.25], "time": [0, 1]})", 2);
    CHECK(g.counts == std::vector<std::size_t>{3, 5});
    REQUIRE(g.include.size() == 2);
    CHECK(g.include[1] == std::vector<double>{0.25});
    CHECK(g.time_nodes == std::vector<double>{0, 1});
    CHECK_THROWS_AS(incred::parse_grid(R"({"counts": [3]})", 2), SemanticError);
    CHECK_THROWS_AS(incred::parse_grid(R"({"spacing": 3})", 2), ParseError);
}

TEST_CASE("missing files are input errors") {
    CHECK_THROWS_AS(incred::load_system("/nonexistent/system.json"), ParseError);
}

TEST_CASE("matrosov block references functions by name") {
    const auto sys = testing::fixture("example6");
    REQUIRE(sys.matrosov.has_value());
    CHECK(sys.matrosov->M() == 2);
    CHECK(sys.matrosov->W.at(0).name == "W1");
    CHECK(sys.matrosov->U.at(1).at(0).name == "U2");
    CHECK(sys.matrosov->delta == 0.1);
    CHECK(sys.matrosov->Delta == 2.0);
}
