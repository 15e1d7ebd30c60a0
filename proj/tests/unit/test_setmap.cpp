#include "doctest.h"

#include <stdexcept>
#include <string>
#include <vector>

#include "incred/error.hpp"
#include "incred/grid.hpp"
#include "incred/setmap.hpp"
#include "support.hpp"

using incred::Box;
using incred::Interval;
using incred::SemanticError;

namespace {

const incred::RegularFunctionSpec& function_named(const incred::SystemDef& sys, const std::string& name) {
    if (sys.V && sys.V->name == name) return *sys.V;
    for (const auto& u : sys.U) {
        if (u.name == name) return u;
    }
    for (const auto& w : sys.matrosov->W) {
        if (w.name == name) return w;
    }
    throw std::logic_error("no function " + name);
}

/// 20 probe points: a lattice through the |x_i| = 1 guards and the origin.
std::vector<std::vector<double>> probe_points(std::size_t n) {
    std::vector<std::vector<double>> pts;
    if (n == 1) {
        for (int k = -10; k < 10; ++k) pts.push_back({0.25 * k});
        return pts;
    }
    for (double a : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        for (double b : {-1.0, -0.5, 0.0, 1.0}) pts.push_back({a, b});
    }
    return pts;
}

}  // namespace

TEST_CASE("Example 1 inclusion pieces") {
    const auto sys = testing::fixture("example1");
    auto F = [&](double x) { return sys.F.eval(std::vector<double>{x}, 0.0); };
    CHECK(F(2.0) == Box{Interval::point(2)});
    CHECK(F(0.0) == Box{Interval::point(-2)});
    CHECK(F(1.0) == Box{Interval(-2, 5)});
    CHECK(F(-1.0) == Box{Interval(-2, 5)});
    CHECK(sys.F.select(std::vector<double>{1.0}, 0.0) == 1);
    CHECK_FALSE(sys.F.time_dependent());
}

TEST_CASE("Example 1 Clarke gradient cases") {
    const auto sys = testing::fixture("example1");
    const auto& U = sys.U.at(0);
    auto dU = [&](double x) { return eval_gradient(U, std::vector<double>{x}, 0.0); };
    CHECK(dU(1.0) == Box{Interval(1, 2), Interval::point(0)});
    CHECK(dU(-1.0) == Box{Interval(-2, -1), Interval::point(0)});
    CHECK(dU(0.5) == Box{Interval::point(1), Interval::point(0)});
    CHECK(dU(-2.0) == Box{Interval::point(-2), Interval::point(0)});
    CHECK(dU(0.0) == Box{Interval(-1, 1), Interval::point(0)});
    CHECK(U(std::vector<double>{2.0}, 0.0) == 3.0);
    CHECK(U.regular);
}

TEST_CASE("map evaluation checks dimensions") {
    const auto sys = testing::fixture("example2");
    CHECK_THROWS_AS(sys.F.eval(std::vector<double>{1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("maps must end with a catch-all piece") {
    CHECK_THROWS_AS(incred::make_map(1, 1, {{"x1 > 0", {"{1}"}}}), SemanticError);
    CHECK_THROWS_AS(incred::make_map(1, 1, {}), SemanticError);
    CHECK_THROWS_AS(incred::make_map(1, 1, {{"otherwise", {"{1}", "{2}"}}}), SemanticError);
    CHECK_THROWS_AS(incred::make_map(1, 1, {{"otherwise", {"{x2}"}}}), incred::ParseError);
    const auto m = incred::make_map(1, 1, {{"x1 > 0", {"{1}"}}, {"otherwise", {"empty"}}});
    CHECK(m.eval(std::vector<double>{1.0}, 0.0) == Box{Interval::point(1)});
    CHECK(m.eval(std::vector<double>{-1.0}, 0.0).is_empty());
}

TEST_CASE("declared gradients must be non-empty with a zero time axis when autonomous") {
    const auto empty_grad = incred::make_function("E", 1, "x1", {{"otherwise", {"empty"}}}, true);
    CHECK_THROWS_AS(eval_gradient(empty_grad, std::vector<double>{0.0}, 0.0), SemanticError);
    const auto bad_time = incred::make_function("B", 1, "x1", {{"otherwise", {"{1}", "{1}"}}}, true);
    CHECK_THROWS_AS(eval_gradient(bad_time, std::vector<double>{0.0}, 0.0), SemanticError);
    const auto ok = incred::make_function("S", 1, "x1", {{"otherwise", {"{1}"}}}, true);
    CHECK(eval_gradient(ok, std::vector<double>{0.0}, 0.0) == Box{Interval::point(1), Interval::point(0)});
}

TEST_CASE("grid nodes include guard coordinates") {
    const auto sys = testing::fixture("example1");
    const auto axes = sys.grid.axis_nodes(sys.domain);
    REQUIRE(axes.size() == 1);
    for (double g : {-1.0, 0.0, 1.0, -3.0, 3.0}) {
        CHECK(std::find(axes[0].begin(), axes[0].end(), g) != axes[0].end());
    }
    CHECK(std::is_sorted(axes[0].begin(), axes[0].end()));
    CHECK(incred::linspace(-2, 2, 5) == std::vector<double>{-2, -1, 0, 1, 2});
    CHECK(sys.grid.refined(10).counts.at(0) == (sys.grid.counts.at(0) - 1) * 10 + 1);
}

TEST_CASE("gradient validation: the U of Example 2 is flat inside the unit square") {
    const auto sys = testing::fixture("example2");
    const std::vector<double> x{0.5, 0.5};
    const auto r = incred::validate_gradient(sys.U.at(0), x, 0.0, 0.05, 200);
    CHECK(r.pass);
    CHECK(r.declared == Box{Interval::point(0), Interval::point(0), Interval::point(0)});
    CHECK(incred::hausdorff(r.estimate_hull, r.declared) < 1e-6);
}

TEST_CASE("gradient validation rejects a wrong declaration") {
    const auto wrong = incred::make_function("W", 1, "abs(x1)", {{"otherwise", {"{1}"}}}, true);
    const auto r = incred::validate_gradient(wrong, std::vector<double>{-0.5}, 0.0, 0.05, 200);
    CHECK_FALSE(r.pass);
    CHECK(r.fraction_inside == 0.0);
}

TEST_CASE("gradient validation passes for the fixture functions at 20 probes") {
    struct Case {
        const char* fixture;
        const char* function;
        double t;
    };
    for (const Case c : {Case{"example1", "U", 0.0}, Case{"example2", "V", 0.0}, Case{"example2", "U", 0.0},
                         Case{"example4", "V", 0.5}, Case{"example6", "U2", 1.0},
                         Case{"example6", "W2", 0.0}}) {
        const auto sys = testing::fixture(c.fixture);
        const auto& f = function_named(sys, c.function);
        const auto pts = probe_points(sys.n);
        REQUIRE(pts.size() == 20);
        for (const auto& x : pts) {
            CAPTURE(c.fixture);
            CAPTURE(c.function);
            CAPTURE(x[0]);
            CAPTURE(x.size() > 1 ? x[1] : 0.0);
            const auto r = incred::validate_gradient(f, x, c.t, 1e-5, 100);
            CHECK(r.pass);
        }
    }
}

TEST_CASE("gradient validation is reproducible for a fixed seed") {
    const auto sys = testing::fixture("example6");
    const auto& U2 = function_named(sys, "U2");
    const std::vector<double> x{1.0, 1.0};
    const auto a = incred::validate_gradient(U2, x, 0.0, 0.05, 150, 42);
    const auto b = incred::validate_gradient(U2, x, 0.0, 0.05, 150, 42);
    CHECK(a.estimate_hull == b.estimate_hull);
    CHECK(a.fraction_inside == b.fraction_inside);
}
