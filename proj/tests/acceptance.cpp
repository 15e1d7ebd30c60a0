// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "incred/certify.hpp"
#include "incred/derivative.hpp"
#include "incred/format.hpp"
#include "incred/reduction.hpp"
#include "incred/simulate.hpp"
#include "oracles.hpp"
#include "support.hpp"

using incred::Box;
using incred::ExtendedReal;
using incred::Interval;
using incred::Verdict;
using incred::format_real;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail << "first failure: " << what << "; ";
        pass = pass && ok;
    }
};

std::string pt(std::span<const double> x) { return "(" + incred::format_reals(x, ", ") + ")"; }

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

void ac1(Outcome& o) {
    const auto sys = testing::fixture("example1");
    const auto rows = incred::tabulate_reduction(sys.F, sys.U, sys.probes);
    o.require(rows.size() == 7, "seven probes");
    for (const auto& r : rows) {
        const double x = r.at.x[0];
        const Box& got = r.value.result;
        Box want = sys.F.eval(r.at.x, r.at.t);
        if (std::abs(x) == 1.0) want = Box{Interval::point(0)};
        if (x == 0.0) want = Box::empty(1);
        o.require(got == want, "x=" + format_real(x) + " gives " + incred::to_string(got));
    }
    o.detail << "7 probes, {0} at |x|=1, empty at 0, F elsewhere";
}

void ac2(Outcome& o) {
    const auto sys = testing::fixture("example2");
    incred::GridSpec grid = sys.grid;
    grid.counts = {51, 51};
    std::size_t off = 0, on = 0;
    double worst = 0.0;
    for (const auto& x : grid.state_nodes(sys.domain)) {
        const auto d = incred::u_generalized_derivative(*sys.V, sys.F, sys.U, x, 0.0);
        if (std::abs(x[0]) == 1.0 || std::abs(x[1]) == 1.0) {
            ++on;
            o.require(d.max.is_neg_inf(), "-inf on guard " + pt(x));
        } else {
            ++off;
            const double err = d.max.is_neg_inf() ? HUGE_VAL : std::abs(d.max.value() + x[0] * x[0] + x[1] * x[1]);
            worst = std::max(worst, err);
            o.require(err <= 1e-9, "-|x|^2 at " + pt(x));
        }
    }
    for (std::vector<double> x : {std::vector<double>{1, 1}, {1, -1}}) {
        const auto bc = incred::baseline_bc_max(*sys.V, sys.F, x, 0.0).max;
        const auto ps = incred::baseline_ps_interval(*sys.V, sys.F, x, 0.0).range;
        o.require(!bc.is_neg_inf() && std::abs(bc.value()) <= 1e-9, "BC max 0 at " + pt(x));
        o.require(!ps.is_empty() && std::abs(ps.hi()) <= 1e-9, "PS max 0 at " + pt(x));
    }
    o.detail << off << " off-guard nodes (max err " << format_real(worst) << "), " << on
             << " guard nodes at -inf, baselines 0 at (1,1) and (1,-1)";
}

void ac3(Outcome& o) {
    const auto sys = testing::fixture("example3");
    auto red = [&](double a, double b) { return incred::reduce_collection(sys.F, sys.U, std::vector<double>{a, b}, 0.0); };
    o.require(red(1, 0) == Box{Interval::point(0), Interval(-1.5, -0.5)}, "(1,0) case");
    o.require(red(-1, 0) == Box{Interval::point(0), Interval(0.5, 1.5)}, "(-1,0) case");
    for (double a : {-1.0, 1.0}) {
        for (double b : {-1.0, 1.0}) o.require(red(a, b).is_empty(), "empty at corner");
    }
    for (std::vector<double> x : {std::vector<double>{0, 0}, {0.5, -0.5}, {1.5, 0.25}, {-0.3, 1.7}}) {
        o.require(red(x[0], x[1]) == sys.F.eval(x, 0.0), "F at interior " + pt(x));
    }

    const auto rep = incred::invariance_data(sys, sys.grid, sys.invariance->zero_tol, sys.invariance->candidates);
    std::set<std::vector<double>> axis;
    for (const auto& x : sys.grid.state_nodes(sys.domain)) {
        if (x[1] == 0.0) axis.insert(x);
    }
    const std::set<std::vector<double>> e(rep.e_nodes.begin(), rep.e_nodes.end());
    o.require(e == axis, "E-estimate equals the x2 = 0 nodes");

    std::size_t rejected = 0;
    bool origin = false;
    for (const auto& c : rep.candidates) {
        if (c.x[0] == 0.0 && c.x[1] == 0.0) {
            origin = c.equilibrium;
            continue;
        }
        const double nu = 0.5 * c.x[0] * c.x[0];
        const bool listed = std::abs(nu - 0.5) < 1e-12 || std::abs(nu - 1) < 1e-12 || std::abs(nu - 2) < 1e-12;
        o.require(listed && !c.equilibrium, "rejects " + pt(c.x));
        if (listed && !c.equilibrium) ++rejected;
    }
    o.require(origin, "accepts the origin");
    o.require(rejected == 6, "six level-set points rejected");
    o.detail << "four-case table, |E| = " << e.size() << " nodes on x2 = 0, " << rejected
             << " candidates rejected, origin accepted";
}

void ac4(Outcome& o) {
    const auto sys = testing::fixture("example4");
    const auto& cs = *sys.certify;
    incred::LyapunovOptions opt;
    opt.W_lower = cs.W_lower;
    opt.W_upper = cs.W_upper;
    const auto cert = incred::certify_lyapunov(sys, cs.W, sys.grid, opt);
    o.require(cert.verdict == Verdict::Certified, "CERTIFIED");
    o.require(sys.grid.counts == std::vector<std::size_t>{51, 51}, "51x51 grid");
    o.require(cert.grid.time_nodes == std::vector<double>{0, 0.5, 1, 2, 5, 10}, "time nodes");
    double worst = -HUGE_VAL;
    for (const auto& c : cert.conditions) {
        if (c.worst) worst = std::max(worst, c.worst->margin.as_double());
    }
    o.require(worst <= 1e-9, "margins within 1e-9");
    o.detail << to_string(cert.verdict) << " on " << cert.grid.state_nodes << " nodes x "
             << cert.grid.time_nodes.size() << " times, worst violation " << format_real(worst);
}

void ac5(Outcome& o) {
    const auto sys = testing::fixture("example6");
    const auto& prob = *sys.matrosov;
    o.require(prob.delta == 0.1 && prob.Delta == 2.0 && prob.gamma == 1.0 && prob.eq_tol == 1e-6, "annulus data");
    const auto chain = incred::matrosov_chain(prob, sys, sys.grid);
    o.require(chain.verdict == Verdict::Certified, "chain CERTIFIED");
    const auto k = incred::matrosov_constants(prob, sys, sys.grid);
    o.require(k.certificate.verdict == Verdict::Certified, "constants CERTIFIED");
    o.require(k.K.size() == 1 && std::isfinite(k.K[0]) && k.K[0] <= std::ldexp(1.0, 20), "finite K1 <= 2^20");
    o.require(k.zeta >= 0.009, "zeta >= 0.009");
    o.require(k.verify_margin <= incred::kCertifyTol, "Z <= -zeta/2 on the fine grid");
    o.detail << "chain " << to_string(chain.verdict) << ", K1 = " << (k.K.empty() ? "none" : format_real(k.K[0]))
             << ", zeta = " << format_real(k.zeta) << ", verify margin " << format_real(k.verify_margin)
             << " on " << k.verify_nodes << " nodes";
}

void ac6(Outcome& o) {
    const auto sys = testing::fixture("example2");
    const std::vector<double> x0{0.5, 0.5};
    const double exact = std::exp(-5.0) * std::sqrt(0.5);
    auto err = [&](double h) {
        const auto traj = incred::integrate(sys, x0, 0.0, h, 5.0, incred::Strategy::Midpoint);
        return std::make_pair(traj.final_norm(), std::abs(traj.final_norm() - exact));
    };
    const auto [norm, e1] = err(1e-3);
    const auto e2 = err(5e-4).second;
    o.require(e1 <= 5e-4, "|x(5)| within 5e-4");
    o.require(e1 / e2 >= 1.8, "error ratio >= 1.8");
    o.detail << "|x(5)| = " << format_real(norm) << " vs " << format_real(exact) << ", error ratio "
             << format_real(e1 / e2);
}

void ac7(Outcome& o) {
    const auto sys = testing::fixture("example2");
    const std::vector<double> x0{2.0, 0.0};
    const auto traj = incred::integrate(sys, x0, 0.0, 1e-3, 10.0, incred::Strategy::Midpoint);
    const auto m = incred::check_reduction_membership(traj, sys, 1e-2);
    o.require(m.fraction <= 0.01, "fraction <= 1%");
    o.require(m.selection_violations == 0, "selections inside F");
    o.detail << m.violations << "/" << m.steps << " steps outside the reduced set";
}

void ac8(Outcome& o) {
    std::mt19937_64 rng(8);
    double worst_bilinear = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + trial % 3;
        const Box P = oracle::random_box(rng, n + 1);
        const Box Q = oracle::random_box(rng, n);
        worst_bilinear = std::max({worst_bilinear, std::abs(incred::bilinear_maxmax(P, Q) - oracle::maxmax(P, Q)),
                                   std::abs(incred::bilinear_minmax(P, Q) - oracle::minmax(P, Q))});
    }
    o.require(worst_bilinear <= 1e-6, "bilinear forms within 1e-6");

    double worst_reduction = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + trial % 3;
        const Box F = oracle::random_box(rng, n, 0.25);
        std::vector<Box> grads;
        for (int k = 0; k <= trial % 2; ++k) grads.push_back(oracle::random_gradient(rng, n, trial % 5 == 0));
        const auto got = incred::reduce_with_gradients(F, grads).result;
        const auto want = oracle::reduction(F, grads);
        const double h = got.is_empty() != want.is_empty() ? HUGE_VAL : incred::hausdorff(got, want);
        worst_reduction = std::max(worst_reduction, h);
    }
    o.require(worst_reduction <= 1e-6, "reduction within 1e-6 Hausdorff");
    o.detail << "1000 bilinear pairs (max err " << format_real(worst_bilinear) << "), 1000 reductions (max Hausdorff "
             << format_real(worst_reduction) << ")";
}

void ac9(Outcome& o) {
    std::size_t probed = 0;
    for (const auto& name : testing::example_fixtures()) {
        const auto sys = testing::fixture(name);
        for (const auto& x : sys.grid.state_nodes(sys.domain)) {
            for (double t : sys.grid.time_nodes) {
                ++probed;
                o.require(subset_of(incred::reduce_collection(sys.F, sys.U, x, t), sys.F.eval(x, t)),
                          name + " reduced set inside F at " + pt(x));
            }
        }
    }

    const auto ex6 = testing::fixture("example6");
    const std::vector<incred::RegularFunctionSpec> none, one{ex6.U.at(0)};
    for (const auto& x : ex6.grid.state_nodes(ex6.domain)) {
        const auto d0 = incred::u_generalized_derivative(*ex6.V, ex6.F, none, x, 1.0).max;
        const auto d1 = incred::u_generalized_derivative(*ex6.V, ex6.F, one, x, 1.0).max;
        const auto d2 = incred::u_generalized_derivative(*ex6.V, ex6.F, ex6.U, x, 1.0).max;
        o.require(d2 <= d1 && d1 <= d0, "monotone in the collection at " + pt(x));
    }

    std::size_t bc_nodes = 0;
    for (const char* name : {"example2", "example3", "example4", "example5"}) {
        const auto sys = testing::fixture(name);
        const std::vector<incred::RegularFunctionSpec> only_v{*sys.V};
        for (const auto& x : sys.grid.state_nodes(sys.domain)) {
            for (double t : sys.grid.time_nodes) {
                ++bc_nodes;
                const auto u = incred::u_generalized_derivative(*sys.V, sys.F, only_v, x, t).max;
                o.require(u == incred::baseline_bc_max(*sys.V, sys.F, x, t).max,
                          std::string(name) + " U={V} equals BC at " + pt(x));
            }
        }
    }

    struct Fn {
        const char* fixture;
        const char* name;
        double t;
    };
    std::size_t validated = 0;
    for (const Fn f : {Fn{"example1", "U", 0.0}, Fn{"example2", "V", 0.0}, Fn{"example2", "U", 0.0},
                       Fn{"example4", "V", 0.5}, Fn{"example6", "U2", 1.0}, Fn{"example6", "W2", 0.0}}) {
        const auto sys = testing::fixture(f.fixture);
        const auto& fn = function_named(sys, f.name);
        std::vector<std::vector<double>> pts;
        if (sys.n == 1) {
            for (int k = -10; k < 10; ++k) pts.push_back({0.25 * k});
        } else {
            for (double a : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
                for (double b : {-1.0, -0.5, 0.0, 1.0}) pts.push_back({a, b});
            }
        }
        for (const auto& x : pts) {
            ++validated;
            o.require(incred::validate_gradient(fn, x, f.t, 1e-5, 100).pass,
                      std::string(f.fixture) + " " + f.name + " gradient at " + pt(x));
        }
    }
    o.detail << probed << " containment probes, U={V} == BC on " << bc_nodes << " nodes, " << validated
             << " gradient validations";
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
        {"AC1 Example 1 reduction table", ac1},
        {"AC2 Example 2 reduced derivative and baselines", ac2},
        {"AC3 Example 3 table, E-estimate and screening", ac3},
        {"AC4 Example 4 nonautonomous certificate", ac4},
        {"AC5 Example 6 Matrosov chain and constants", ac5},
        {"AC6 Simulation matches exp(-t) decay", ac6},
        {"AC7 Trajectory stays in the reduced inclusion", ac7},
        {"AC8 Bilinear and reduction oracles", ac8},
        {"AC9 Structural properties", ac9},
    };
    int failures = 0;
    for (const auto& [label, run] : criteria) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            run(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s  %-48s %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", label, o.detail.str().c_str(), secs);
        if (!o.pass) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
