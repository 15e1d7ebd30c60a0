#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "incred/derivative.hpp"
#include "incred/expr.hpp"
#include "incred/grid.hpp"
#include "incred/system.hpp"

namespace incred {

enum class Verdict { Certified, Inconclusive, Violated };

const char* to_string(Verdict v) noexcept;

/// Absolute slack on every grid inequality.
inline constexpr double kCertifyTol = 1e-9;

/// A grid node together with the quantities compared there.
struct Witness {
    StatePoint at;
    std::vector<double> z;  // Matrosov nodes only
    /// Left-hand side of the checked inequality (e.g. the derivative).
    ExtendedReal lhs;
    /// Right-hand side (e.g. -W(x)).
    double rhs = 0.0;
    /// lhs - rhs; the inequality holds when margin <= tolerance.
    ExtendedReal margin;
    /// Free-form qualifier, e.g. which chain level fired.
    std::string detail;
};

/// Outcome of one grid inequality over every node.
struct ConditionResult {
    std::string id;
    Verdict verdict = Verdict::Certified;
    std::size_t nodes_checked = 0;
    std::size_t failures = 0;
    /// Node with the largest margin (ties: smaller |x|, then earlier node).
    std::optional<Witness> worst;
};

struct GridSummary {
    std::vector<std::size_t> axis_nodes;
    std::size_t state_nodes = 0;
    std::vector<double> time_nodes;
};

/// Fold of several ConditionResults. The headline fields mirror the first
/// failing condition, or the primary one when everything passes.
struct Certificate {
    Verdict verdict = Verdict::Certified;
    std::string condition;
    std::optional<Witness> worst;
    std::vector<ConditionResult> conditions;
    std::vector<std::pair<std::string, double>> tolerances;
    GridSummary grid;
    std::vector<std::string> notes;

    std::string summary_text() const;
};

enum class DerivativeMode {
    /// U-generalized derivative with the system's collection U.
    Reduced,
    /// U = {V}, which coincides with the Bacciotti-Ceragioli maximum.
    Baseline,
};

struct LyapunovOptions {
    DerivativeMode mode = DerivativeMode::Reduced;
    std::optional<expr::ScalarExpr> W_lower;
    std::optional<expr::ScalarExpr> W_upper;
    double tol = kCertifyTol;
};

/// Checks derivative <= -W at every grid node and time node, screens V for
/// positive definiteness, and checks W_lower <= V <= W_upper when given.
/// Time nodes are used only for nonautonomous systems.
Certificate certify_lyapunov(const SystemDef& sys, const expr::ScalarExpr& W, const GridSpec& grid,
                             const LyapunovOptions& options = {});

/// derivative <= -W and W >= 0 on the grid. No definiteness screen for V.
Certificate certify_semidefinite(const SystemDef& sys, const expr::ScalarExpr& W,
                                 const GridSpec& grid, DerivativeMode mode = DerivativeMode::Reduced,
                                 double tol = kCertifyTol);

struct CandidateCheck {
    std::vector<double> x;
    Box F;
    bool equilibrium = false;  // 0 in F(x)
};

struct InvarianceReport {
    double zero_tol = 0.0;
    /// Nodes where |derivative| <= zero_tol.
    std::vector<std::vector<double>> e_nodes;
    /// Nodes where the reduced set is empty (derivative -inf).
    std::size_t empty_nodes = 0;
    Certificate semidefinite;
    std::vector<CandidateCheck> candidates;
};

/// Throws SemanticError for nonautonomous systems.
InvarianceReport invariance_data(const SystemDef& sys, const GridSpec& grid, double zero_tol,
                                 const std::vector<std::vector<double>>& candidates = {});

// ---------------------------------------------------------------------------
// Matrosov

/// Sample nodes of B(0, gamma) x D(delta, Delta).
struct MatrosovNodes {
    std::vector<std::vector<double>> z;
    std::vector<std::vector<double>> x;
};

MatrosovNodes matrosov_nodes(const MatrosovProblem& prob, const SystemDef& sys,
                             const GridSpec& grid);

/// Nested chain: whenever |Y_i| <= eq_tol for all i <= j, Y_{j+1} <= eq_tol,
/// with Y_0 = 0 and Y_{M+1} = 1.
Certificate matrosov_chain(const MatrosovProblem& prob, const SystemDef& sys,
                           const GridSpec& grid);

struct MatrosovConstants {
    Certificate certificate;
    std::vector<double> K;  // K_1 .. K_{M-1}
    double epsilon = 0.0;
    double zeta = 0.0;
    /// Worst Z + zeta / 2^{M-1} on the verification grid.
    double verify_margin = 0.0;
    std::size_t verify_nodes = 0;
};

/// Doubling search for K_j so that Z = sum K_j Y_j + Y_M <= -zeta / 2^{M-1}
/// on the grid, followed by a check on the grid refined 10x.
MatrosovConstants matrosov_constants(const MatrosovProblem& prob, const SystemDef& sys,
                                     const GridSpec& grid);

/// Derivative bound: the U_j-generalized derivative of W_j is at most
/// Y_j(phi(x, t), x) on the annulus nodes. One result per j.
std::vector<ConditionResult> matrosov_derivative_bounds(const MatrosovProblem& prob,
                                                        const SystemDef& sys,
                                                        const GridSpec& grid);

struct BoundednessReport {
    double max_abs_W = 0.0;
    double max_abs_phi = 0.0;
    double gamma = 0.0;
    bool within_gamma = true;
};

/// max |W_j| and max |phi| over the annulus nodes, compared with gamma.
BoundednessReport matrosov_boundedness(const MatrosovProblem& prob, const SystemDef& sys,
                                       const GridSpec& grid);

}  // namespace incred
