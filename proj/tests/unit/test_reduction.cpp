#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "incred/grid.hpp"
#include "incred/reduction.hpp"
#include "oracles.hpp"
#include "support.hpp"

using incred::Box;
using incred::Interval;

namespace {

Box pt_box(std::initializer_list<double> v) {
    std::vector<Interval> axes;
    for (double x : v) axes.push_back(Interval::point(x));
    return Box(axes);
}

Box reduced_at(const incred::SystemDef& sys, std::vector<double> x, double t = 0.0) {
    return incred::reduce_collection(sys.F, sys.U, x, t);
}

}  // namespace

TEST_CASE("Example 1 reduction table at the probes") {
    const auto sys = testing::fixture("example1");
    const auto rows = incred::tabulate_reduction(sys.F, sys.U, sys.probes);
    REQUIRE(rows.size() == 7);
    for (const auto& r : rows) {
        const double x = r.at.x[0];
        CAPTURE(x);
        if (std::abs(x) == 1.0) {
            CHECK(r.value.result == pt_box({0}));
        } else if (x == 0.0) {
            CHECK(r.value.result.is_empty());
        } else {
            CHECK(r.value.result == sys.F.eval(r.at.x, r.at.t));
        }
    }
}

TEST_CASE("Example 3 reduced inclusion has four cases") {
    const auto sys = testing::fixture("example3");
    CHECK(reduced_at(sys, {1, 0}) == Box{Interval::point(0), Interval(-1.5, -0.5)});
    CHECK(reduced_at(sys, {-1, 0}) == Box{Interval::point(0), Interval(0.5, 1.5)});
    for (std::vector<double> corner : {std::vector<double>{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}) {
        CHECK(reduced_at(sys, corner).is_empty());
    }
    for (std::vector<double> edge : {std::vector<double>{1, 0.5}, {0.3, 1}, {-1, -0.25}, {0, -1}, {2, 1}}) {
        CHECK(reduced_at(sys, edge).is_empty());
    }
    for (std::vector<double> inner : {std::vector<double>{0, 0}, {0.5, -0.5}, {1.5, 0.25}, {-2, 2}}) {
        CHECK(reduced_at(sys, inner) == sys.F.eval(inner, 0.0));
    }
}

TEST_CASE("smooth reduction functions leave F unchanged") {
    const auto sys = testing::fixture("smooth_u");
    for (const auto& x : sys.grid.state_nodes(sys.domain)) {
        CHECK(reduced_at(sys, x) == sys.F.eval(x, 0.0));
    }
}

TEST_CASE("the reduced inclusion is contained in F at every grid node") {
    for (const auto& name : testing::example_fixtures()) {
        const auto sys = testing::fixture(name);
        for (const auto& x : sys.grid.state_nodes(sys.domain)) {
            for (double t : sys.grid.time_nodes) {
                CAPTURE(name);
                CHECK(incred::subset_of(reduced_at(sys, x, t), sys.F.eval(x, t)));
            }
        }
    }
}

TEST_CASE("a larger collection reduces at least as much") {
    const auto sys = testing::fixture("example6");
    const std::vector<incred::RegularFunctionSpec> one{sys.U.at(0)};
    for (const auto& x : sys.grid.state_nodes(sys.domain)) {
        const auto small = incred::reduce_collection(sys.F, sys.U, x, 1.0);
        const auto large = incred::reduce_collection(sys.F, one, x, 1.0);
        CHECK(incred::subset_of(small, large));
    }
}

TEST_CASE("a nondegenerate time axis empties the reduction") {
    const Box F{Interval(-1, 1)};
    const Box grad{Interval::point(1), Interval(0, 1)};
    const auto r = incred::reduce_with_gradient(F, grad);
    CHECK(r.time_obstruction);
    CHECK(r.result.is_empty());
    CHECK_THROWS_AS(incred::reduce_with_gradient(F, Box{Interval(0, 1)}), std::invalid_argument);
}

TEST_CASE("reduction agrees with the sampling-acceptance oracle") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + trial % 3;
        const Box F = oracle::random_box(rng, n, 0.25);
        std::vector<Box> grads;
        const int count = 1 + trial % 2;
        for (int k = 0; k < count; ++k) grads.push_back(oracle::random_gradient(rng, n, trial % 5 == 0));
        const auto got = incred::reduce_with_gradients(F, grads).result;
        const auto want = oracle::reduction(F, grads);
        CAPTURE(trial);
        CAPTURE(incred::to_string(F));
        CHECK(got.is_empty() == want.is_empty());
        CHECK(incred::hausdorff(got, want) <= 1e-6);
    }
}

TEST_CASE("reduction CSV marks empty rows") {
    const auto sys = testing::fixture("example1");
    const auto rows = incred::tabulate_reduction(sys.F, sys.U, sys.probes);
    const auto csv = incred::reduction_csv(rows, 1);
    CHECK(csv.rfind("x1,t,F_lo1,F_hi1,Fred_lo1,Fred_hi1,empty\n", 0) == 0);
    CHECK(csv.find("0,0,-2,-2,nan,nan,1\n") != std::string::npos);
    CHECK(incred::reduction_table(rows).find("empty") != std::string::npos);
}
