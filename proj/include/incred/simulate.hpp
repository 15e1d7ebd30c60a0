#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "incred/expr.hpp"
#include "incred/system.hpp"

namespace incred {

enum class Strategy {
    /// Vertex of the reduced set (F if the reduction is empty) that
    /// minimizes <p, q> for p the center of the gradient of V.
    ReducedDescent,
    /// Center of F.
    Midpoint,
    /// Random vertex of F from a seeded 64-bit Mersenne twister.
    RandomExtreme,
};

/// Throws std::invalid_argument on an unknown name.
Strategy parse_strategy(std::string_view name);
const char* to_string(Strategy s) noexcept;

struct Sample {
    double t = 0.0;
    std::vector<double> x;
    /// Velocity selected at (t, x); the next state is x + h q.
    std::vector<double> q;
    /// V(x, t), NaN when the system declares no V.
    double V = 0.0;
};

struct Trajectory {
    double t0 = 0.0;
    double h = 0.0;
    double T = 0.0;
    Strategy strategy = Strategy::Midpoint;
    std::uint64_t seed = 0;
    std::vector<Sample> samples;
    /// True when the run stopped because x left the domain box.
    bool exited_domain = false;

    std::size_t steps() const noexcept { return samples.empty() ? 0 : samples.size() - 1; }
    double final_norm() const;
};

/// Forward Euler x_{k+1} = x_k + h q_k with q_k chosen from F(x_k, t_k),
/// t_k = t0 + k h, until t reaches T. Throws SemanticError if F is empty at
/// a reached state or x0 lies outside the domain.
Trajectory integrate(const SystemDef& sys, std::span<const double> x0, double t0, double h,
                     double T, Strategy strategy, std::uint64_t seed = 1);

std::string trajectory_csv(const Trajectory& traj);

struct MembershipReport {
    double tol = 0.0;
    std::size_t steps = 0;
    std::size_t violations = 0;
    double fraction = 0.0;
    double max_distance = 0.0;
    /// Steps whose selected q is outside F(x_k, t_k); must be zero.
    std::size_t selection_violations = 0;
    bool pass = false;
};

inline constexpr double kMembershipBudget = 0.01;

/// Distance of each difference quotient to the reduced set at the step's
/// start, against tol * max(1, |q|_inf). PASS iff the violating fraction is
/// at most kMembershipBudget.
MembershipReport check_reduction_membership(const Trajectory& traj, const SystemDef& sys,
                                            double tol = 1e-2);

struct DescentReport {
    std::size_t steps = 0;
    /// Steps with V_{k+1} - V_k > -h W(x_k) + 10 h^2.
    std::size_t violations = 0;
    /// max over steps of (V_{k+1} - V_k) / h + W(x_k).
    double worst_gap = 0.0;
    /// Steps where V grows by more than 10 h^2.
    std::size_t monotone_violations = 0;
    bool pass = false;
};

DescentReport check_lyapunov_descent(const Trajectory& traj, const SystemDef& sys,
                                     const expr::ScalarExpr& W);

struct ConvergenceReport {
    double tail_fraction = 0.0;
    std::size_t tail_samples = 0;
    double tail_max = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

inline constexpr double kTailThreshold = 1e-3;

ConvergenceReport check_partial_convergence(const Trajectory& traj, const expr::ScalarExpr& W,
                                            double tail_fraction,
                                            double threshold = kTailThreshold);

}  // namespace incred
