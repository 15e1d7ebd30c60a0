#include "incred/certify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "incred/error.hpp"
#include "incred/format.hpp"
#include "incred/parallel.hpp"
#include "incred/reduction.hpp"

namespace incred {

const char* to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::Certified: return "CERTIFIED";
        case Verdict::Inconclusive: return "INCONCLUSIVE";
        case Verdict::Violated: return "VIOLATED";
    }
    return "?";
}

namespace {

struct NodeOutcome {
    Witness w;
    bool failed = false;
};

/// Ordered fold of per-node outcomes into a ConditionResult.
ConditionResult fold(std::string id, const std::vector<NodeOutcome>& outcomes) {
    ConditionResult r;
    r.id = std::move(id);
    r.nodes_checked = outcomes.size();
    double best_norm = 0.0;
    for (const auto& o : outcomes) {
        if (o.failed) ++r.failures;
        const double nrm = norm2(o.w.at.x);
        const bool take = !r.worst || o.w.margin > r.worst->margin ||
                          (o.w.margin == r.worst->margin && nrm < best_norm);
        if (take) {
            r.worst = o.w;
            best_norm = nrm;
        }
    }
    r.verdict = r.failures == 0 ? Verdict::Certified : Verdict::Violated;
    return r;
}

Certificate assemble(std::string primary, std::vector<ConditionResult> conditions) {
    Certificate c;
    c.condition = primary;
    for (const auto& cond : conditions) {
        if (cond.id == primary) c.worst = cond.worst;
    }
    for (const auto& cond : conditions) {
        if (cond.verdict == Verdict::Violated) {
            c.verdict = Verdict::Violated;
            c.condition = cond.id;
            c.worst = cond.worst;
            break;
        }
    }
    c.conditions = std::move(conditions);
    return c;
}

GridSummary summarize(const std::vector<std::vector<double>>& axes, std::size_t state_nodes,
                      std::vector<double> times) {
    GridSummary g;
    for (const auto& a : axes) g.axis_nodes.push_back(a.size());
    g.state_nodes = state_nodes;
    g.time_nodes = std::move(times);
    return g;
}

std::vector<double> check_times(const SystemDef& sys, const GridSpec& grid) {
    if (grid.time_nodes.empty()) return {0.0};
    if (sys.autonomous()) return {grid.time_nodes.front()};
    return grid.time_nodes;
}

const RegularFunctionSpec& require_V(const SystemDef& sys) {
    if (!sys.V) throw SemanticError("system '" + sys.name + "' declares no V");
    return *sys.V;
}

std::vector<RegularFunctionSpec> collection_for(const SystemDef& sys, DerivativeMode mode) {
    if (mode == DerivativeMode::Baseline) return {require_V(sys)};
    return sys.U;
}

/// Runs fn over every (node, time) pair in parallel; results are indexed
/// node-major so the fold is schedule independent.
template <class Fn>
std::vector<NodeOutcome> over_grid(const std::vector<std::vector<double>>& nodes,
                                   const std::vector<double>& times, Fn fn) {
    std::vector<NodeOutcome> out(nodes.size() * times.size());
    parallel_for(out.size(), [&](std::size_t k) {
        const auto& x = nodes[k / times.size()];
        const double t = times[k % times.size()];
        out[k] = fn(x, t);
    });
    return out;
}

NodeOutcome inequality(std::span<const double> x, double t, ExtendedReal lhs, double rhs,
                       double tol) {
    NodeOutcome o;
    o.w.at = {std::vector<double>(x.begin(), x.end()), t};
    o.w.lhs = lhs;
    o.w.rhs = rhs;
    o.w.margin = lhs.is_neg_inf() ? ExtendedReal::neg_inf() : ExtendedReal(lhs.value() - rhs);
    o.failed = o.w.margin > ExtendedReal(tol);
    return o;
}

ConditionResult decrease_condition(const SystemDef& sys, const expr::ScalarExpr& W,
                                   const std::vector<std::vector<double>>& nodes,
                                   const std::vector<double>& times, DerivativeMode mode,
                                   double tol, std::string id) {
    const auto& V = require_V(sys);
    const auto Us = collection_for(sys, mode);
    auto outcomes = over_grid(nodes, times, [&](const std::vector<double>& x, double t) {
        const auto d = u_generalized_derivative(V, sys.F, Us, x, t);
        return inequality(x, t, d.max, -W.eval({x, t}), tol);
    });
    return fold(std::move(id), outcomes);
}

}  // namespace

std::string Certificate::summary_text() const {
    std::ostringstream os;
    os << to_string(verdict);
    if (verdict == Verdict::Certified) os << " (certified on grid)";
    os << "  condition=" << condition << '\n';
    for (const auto& c : conditions) {
        os << "  " << c.id << ": " << to_string(c.verdict) << ", " << c.failures << '/'
           << c.nodes_checked << " nodes failing";
        if (c.worst) {
            os << ", worst margin " << c.worst->margin.to_string() << " at x=("
               << format_reals(c.worst->at.x, ", ") << ") t=" << format_real(c.worst->at.t);
            if (!c.worst->z.empty()) os << " z=(" << format_reals(c.worst->z, ", ") << ')';
            if (!c.worst->detail.empty()) os << " [" << c.worst->detail << ']';
        }
        os << '\n';
    }
    os << "  grid: " << grid.state_nodes << " state nodes x " << grid.time_nodes.size()
       << " time nodes\n";
    for (const auto& n : notes) os << "  note: " << n << '\n';
    return os.str();
}

Certificate certify_lyapunov(const SystemDef& sys, const expr::ScalarExpr& W, const GridSpec& grid,
                             const LyapunovOptions& options) {
    const auto& V = require_V(sys);
    const auto axes = grid.axis_nodes(sys.domain);
    const auto nodes = cartesian_product(axes);
    const auto times = check_times(sys, grid);

    std::vector<ConditionResult> conds;
    conds.push_back(
        decrease_condition(sys, W, nodes, times, options.mode, options.tol, "lyapunov-decrease"));

    // V(0, t) = 0 and V > 0 elsewhere. Margin: |V| at the origin, -V away
    // from it; failure is any nonzero value at 0 or V <= 0 elsewhere.
    auto pd = over_grid(nodes, times, [&](const std::vector<double>& x, double t) {
        NodeOutcome o;
        o.w.at = {x, t};
        const double v = V(x, t);
        o.w.lhs = v;
        const bool origin = norm2(x) == 0.0;
        o.w.margin = origin ? std::abs(v) : -v;
        o.failed = origin ? v != 0.0 : !(v > 0.0);
        o.w.detail = origin ? "V(0) = 0" : "V > 0";
        return o;
    });
    conds.push_back(fold("V-positive-definite", pd));

    if (options.W_lower) {
        auto lower = over_grid(nodes, times, [&](const std::vector<double>& x, double t) {
            return inequality(x, t, options.W_lower->eval({x, t}), V(x, t), options.tol);
        });
        conds.push_back(fold("sandwich-lower", lower));
    }
    if (options.W_upper) {
        auto upper = over_grid(nodes, times, [&](const std::vector<double>& x, double t) {
            return inequality(x, t, V(x, t), options.W_upper->eval({x, t}), options.tol);
        });
        conds.push_back(fold("sandwich-upper", upper));
    }

    Certificate c = assemble("lyapunov-decrease", std::move(conds));
    c.tolerances = {{"decrease", options.tol}};
    c.grid = summarize(axes, nodes.size(), times);
    c.notes.push_back(options.mode == DerivativeMode::Baseline
                          ? "derivative: U = {V} (baseline)"
                          : "derivative: U-generalized with " + std::to_string(sys.U.size()) +
                                " reduction function(s)");

    bool strict = true;
    for (const auto& x : nodes) {
        if (norm2(x) == 0.0) continue;
        for (double t : times) strict = strict && W.eval({x, t}) > 0.0;
    }
    c.notes.push_back(strict ? "W > 0 at every nonzero node: asymptotic decrease"
                             : "W vanishes at a nonzero node: decrease is semidefinite only");
    return c;
}

Certificate certify_semidefinite(const SystemDef& sys, const expr::ScalarExpr& W,
                                 const GridSpec& grid, DerivativeMode mode, double tol) {
    const auto axes = grid.axis_nodes(sys.domain);
    const auto nodes = cartesian_product(axes);
    const auto times = check_times(sys, grid);

    std::vector<ConditionResult> conds;
    conds.push_back(decrease_condition(sys, W, nodes, times, mode, tol, "semidefinite-decrease"));
    auto nonneg = over_grid(nodes, times, [&](const std::vector<double>& x, double t) {
        return inequality(x, t, -W.eval({x, t}), 0.0, tol);
    });
    conds.push_back(fold("W-nonnegative", nonneg));

    Certificate c = assemble("semidefinite-decrease", std::move(conds));
    c.tolerances = {{"decrease", tol}};
    c.grid = summarize(axes, nodes.size(), times);
    return c;
}

InvarianceReport invariance_data(const SystemDef& sys, const GridSpec& grid, double zero_tol,
                                 const std::vector<std::vector<double>>& candidates) {
    if (!sys.autonomous()) {
        throw SemanticError("invariance analysis needs an autonomous system");
    }
    const auto& V = require_V(sys);
    const auto nodes = grid.state_nodes(sys.domain);
    const double t = grid.time_nodes.empty() ? 0.0 : grid.time_nodes.front();

    std::vector<ExtendedReal> d(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t k) {
        d[k] = u_generalized_derivative(V, sys.F, sys.U, nodes[k], t).max;
    });

    InvarianceReport r;
    r.zero_tol = zero_tol;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (d[k].is_neg_inf()) {
            ++r.empty_nodes;
        } else if (std::abs(d[k].value()) <= zero_tol) {
            r.e_nodes.push_back(nodes[k]);
        }
    }
    r.semidefinite = certify_semidefinite(sys, expr::ScalarExpr::constant(0.0), grid,
                                          DerivativeMode::Reduced, zero_tol);
    for (const auto& x : candidates) {
        if (x.size() != sys.n) throw SemanticError("invariance candidate has wrong dimension");
        CandidateCheck cc;
        cc.x = x;
        cc.F = sys.F.eval(x, t);
        const std::vector<double> zero(sys.n, 0.0);
        cc.equilibrium = contains(cc.F, zero);
        r.candidates.push_back(std::move(cc));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Matrosov

namespace {

void check_annulus(const MatrosovProblem& prob, const SystemDef& sys) {
    if (!(0.0 < prob.delta && prob.delta < prob.Delta)) {
        throw SemanticError("Matrosov annulus needs 0 < delta < Delta");
    }
    for (std::size_t i = 0; i < sys.n; ++i) {
        if (sys.domain[i].lo() > -prob.Delta || sys.domain[i].hi() < prob.Delta) {
            throw SemanticError("Matrosov annulus radius Delta exceeds the domain");
        }
    }
    if (!(prob.gamma > 0.0)) throw SemanticError("Matrosov gamma must be positive");
}

std::vector<std::vector<double>> annulus_nodes(const MatrosovProblem& prob, const SystemDef& sys,
                                               const GridSpec& grid) {
    const Annulus ann(prob.delta, prob.Delta);
    auto nodes = grid.state_nodes(sys.domain);
    std::erase_if(nodes, [&](const std::vector<double>& x) { return !ann.contains(x); });
    if (nodes.empty()) throw SemanticError("no grid node lies in the Matrosov annulus");
    return nodes;
}

double time_of(const GridSpec& grid) { return grid.time_nodes.empty() ? 0.0 : grid.time_nodes.front(); }

/// Y values for every (z, x) node, z-major.
struct YTable {
    std::vector<const std::vector<double>*> z;
    std::vector<const std::vector<double>*> x;
    std::vector<std::vector<double>> y;  // y[k][j] = Y_{j+1}
};

YTable tabulate_y(const MatrosovProblem& prob, const MatrosovNodes& nodes, double t) {
    YTable tab;
    const std::size_t count = nodes.z.size() * nodes.x.size();
    tab.z.resize(count);
    tab.x.resize(count);
    tab.y.resize(count);
    parallel_for(count, [&](std::size_t k) {
        const auto& z = nodes.z[k / nodes.x.size()];
        const auto& x = nodes.x[k % nodes.x.size()];
        tab.z[k] = &z;
        tab.x[k] = &x;
        std::vector<double> ys(prob.M());
        for (std::size_t j = 0; j < prob.M(); ++j) ys[j] = prob.Y[j].eval({x, t, z});
        tab.y[k] = std::move(ys);
    });
    return tab;
}

/// max_{i <= level} |Y_i| <= eq_tol (level 0 is always true).
bool triggered(const std::vector<double>& y, std::size_t level, double eq_tol) {
    for (std::size_t i = 0; i < level; ++i) {
        if (std::abs(y[i]) > eq_tol) return false;
    }
    return true;
}

Witness matrosov_witness(const std::vector<double>& z, const std::vector<double>& x, double t,
                         double lhs, double rhs) {
    Witness w;
    w.at = {x, t};
    w.z = z;
    w.lhs = lhs;
    w.rhs = rhs;
    w.margin = lhs - rhs;
    return w;
}

}  // namespace

MatrosovNodes matrosov_nodes(const MatrosovProblem& prob, const SystemDef& sys,
                             const GridSpec& grid) {
    check_annulus(prob, sys);
    MatrosovNodes out;
    out.x = annulus_nodes(prob, sys, grid);
    const std::size_t k = prob.phi.size();
    if (k == 0) {
        out.z.push_back({});
        return out;
    }
    const std::size_t count = std::max<std::size_t>(prob.z_count, 2);
    const auto axis = linspace(-prob.gamma, prob.gamma, count);
    out.z = cartesian_product(std::vector<std::vector<double>>(k, axis));
    std::erase_if(out.z, [&](const std::vector<double>& z) { return norm2(z) > prob.gamma; });
    const std::vector<double> origin(k, 0.0);
    if (std::find(out.z.begin(), out.z.end(), origin) == out.z.end()) {
        out.z.insert(std::lower_bound(out.z.begin(), out.z.end(), origin), origin);
    }
    return out;
}

Certificate matrosov_chain(const MatrosovProblem& prob, const SystemDef& sys,
                           const GridSpec& grid) {
    const auto nodes = matrosov_nodes(prob, sys, grid);
    const double t = time_of(grid);
    const auto tab = tabulate_y(prob, nodes, t);
    const std::size_t M = prob.M();

    std::vector<NodeOutcome> outcomes(tab.y.size());
    for (std::size_t k = 0; k < tab.y.size(); ++k) {
        const auto& y = tab.y[k];
        // Level j fires when Y_1..Y_j all vanish; it then requires Y_{j+1} <= 0.
        double worst = -HUGE_VAL;
        std::size_t worst_level = 0;
        for (std::size_t j = 0; j <= M; ++j) {
            if (!triggered(y, j, prob.eq_tol)) break;
            const double next = j < M ? y[j] : 1.0;
            if (next > worst) {
                worst = next;
                worst_level = j;
            }
        }
        NodeOutcome o;
        o.w = matrosov_witness(*tab.z[k], *tab.x[k], t, worst, 0.0);
        o.w.detail = "Y_1..Y_" + std::to_string(worst_level) + " vanish, Y_" +
                     std::to_string(worst_level + 1) + " checked";
        o.failed = worst > prob.eq_tol;
        outcomes[k] = std::move(o);
    }

    std::vector<ConditionResult> conds;
    conds.push_back(fold("matrosov-chain", outcomes));
    Certificate c = assemble("matrosov-chain", std::move(conds));
    c.tolerances = {{"eq_tol", prob.eq_tol}};
    c.grid.axis_nodes = {nodes.z.size(), nodes.x.size()};
    c.grid.state_nodes = nodes.x.size();
    c.grid.time_nodes = {t};
    c.notes.push_back("nodes: " + std::to_string(nodes.z.size()) + " z-nodes in B(0," +
                      format_real(prob.gamma) + ") x " + std::to_string(nodes.x.size()) +
                      " x-nodes in D(" + format_real(prob.delta) + "," + format_real(prob.Delta) +
                      ")");
    return c;
}

MatrosovConstants matrosov_constants(const MatrosovProblem& prob, const SystemDef& sys,
                                     const GridSpec& grid) {
    MatrosovConstants out;
    out.certificate = matrosov_chain(prob, sys, grid);
    auto inconclusive = [&](std::string why) {
        out.certificate.verdict = Verdict::Inconclusive;
        out.certificate.condition = "matrosov-constants";
        out.certificate.notes.push_back(std::move(why));
        return out;
    };
    if (out.certificate.verdict != Verdict::Certified) {
        return inconclusive("constant search skipped: the chain is not certified");
    }

    const auto nodes = matrosov_nodes(prob, sys, grid);
    const double t = time_of(grid);
    const auto tab = tabulate_y(prob, nodes, t);
    const std::size_t M = prob.M();

    // epsilon from the deepest trigger set.
    double max_last = -HUGE_VAL;
    for (const auto& y : tab.y) {
        if (triggered(y, M - 1, prob.eq_tol)) max_last = std::max(max_last, y[M - 1]);
    }
    if (max_last == -HUGE_VAL) {
        if (!prob.zeta_target) {
            return inconclusive("no node has Y_1..Y_" + std::to_string(M - 1) +
                                " vanishing; epsilon cannot be estimated, give zeta_target");
        }
        out.epsilon = *prob.zeta_target;
    } else {
        out.epsilon = -max_last;
    }
    out.zeta = prob.zeta_target.value_or(out.epsilon);
    if (!(out.zeta > 0.0)) {
        return inconclusive("epsilon estimate " + format_real(out.epsilon) + " is not positive");
    }

    // Backward recursion: Z_M = Y_M, Z_l = K_l Y_l + Z_{l+1}, each required
    // to be <= -zeta / 2^{M-l} on the nodes where Y_1..Y_{l-1} vanish.
    const double cap = std::ldexp(1.0, static_cast<int>(prob.cap_exponent));
    std::vector<double> Z(tab.y.size());
    for (std::size_t k = 0; k < Z.size(); ++k) Z[k] = tab.y[k][M - 1];
    out.K.assign(M - 1, 0.0);
    for (std::size_t l = M - 1; l >= 1; --l) {
        const double target = -out.zeta / std::ldexp(1.0, static_cast<int>(M - l));
        double K = 1.0;
        for (;;) {
            std::size_t bad = Z.size();
            for (std::size_t k = 0; k < Z.size(); ++k) {
                if (!triggered(tab.y[k], l - 1, prob.eq_tol)) continue;
                if (K * tab.y[k][l - 1] + Z[k] > target) {
                    bad = k;
                    break;
                }
            }
            if (bad == Z.size()) break;
            K *= 2.0;
            if (K > cap) {
                std::ostringstream why;
                why << "K_" << l << " exceeds 2^" << prob.cap_exponent << "; at x=("
                    << format_reals(*tab.x[bad], ", ") << ") Z_" << l + 1 << "="
                    << format_real(Z[bad]) << ", Y_" << l << "=" << format_real(tab.y[bad][l - 1])
                    << ", target " << format_real(target);
                return inconclusive(why.str());
            }
        }
        out.K[l - 1] = K;
        for (std::size_t k = 0; k < Z.size(); ++k) Z[k] += K * tab.y[k][l - 1];
    }
    if (M == 1) {
        for (std::size_t k = 0; k < Z.size(); ++k) {
            if (Z[k] > -out.zeta) return inconclusive("Y_1 > -zeta at some node");
        }
    }

    // Verification on a finer grid.
    const double bound = -out.zeta / std::ldexp(1.0, static_cast<int>(M - 1));
    const auto fine_nodes = matrosov_nodes(prob, sys, grid.refined(10));
    const std::size_t count = fine_nodes.z.size() * fine_nodes.x.size();
    std::vector<NodeOutcome> outcomes(count);
    parallel_for(count, [&](std::size_t k) {
        const auto& z = fine_nodes.z[k / fine_nodes.x.size()];
        const auto& x = fine_nodes.x[k % fine_nodes.x.size()];
        double zval = prob.Y[M - 1].eval({x, t, z});
        for (std::size_t j = 0; j + 1 < M; ++j) zval += out.K[j] * prob.Y[j].eval({x, t, z});
        NodeOutcome o;
        o.w = matrosov_witness(z, x, t, zval, bound);
        o.failed = zval > bound + kCertifyTol;
        outcomes[k] = std::move(o);
    });
    auto verify = fold("matrosov-constants", outcomes);
    out.verify_nodes = count;
    out.verify_margin = verify.worst ? verify.worst->margin.as_double() : -HUGE_VAL;
    const bool ok = verify.verdict == Verdict::Certified;
    out.certificate.conditions.push_back(std::move(verify));
    if (!ok) {
        return inconclusive("constants found on the search grid fail on the 10x finer grid");
    }
    out.certificate.notes.push_back("Z <= -zeta/2^(M-1) verified on " + std::to_string(count) +
                                    " nodes of the 10x refined grid");
    return out;
}

std::vector<ConditionResult> matrosov_derivative_bounds(const MatrosovProblem& prob,
                                                        const SystemDef& sys,
                                                        const GridSpec& grid) {
    std::vector<ConditionResult> out;
    if (prob.W.empty()) return out;
    check_annulus(prob, sys);
    const auto nodes = annulus_nodes(prob, sys, grid);
    const auto times = check_times(sys, grid);
    for (std::size_t j = 0; j < prob.M(); ++j) {
        const auto& W = prob.W[j];
        const auto& Us = prob.U[j];
        auto outcomes = over_grid(nodes, times, [&](const std::vector<double>& x, double t) {
            std::vector<double> z(prob.phi.size());
            for (std::size_t i = 0; i < z.size(); ++i) z[i] = prob.phi[i].eval({x, t});
            const auto d = u_generalized_derivative(W, sys.F, Us, x, t);
            auto o = inequality(x, t, d.max, prob.Y[j].eval({x, t, z}), kCertifyTol);
            o.w.z = std::move(z);
            return o;
        });
        out.push_back(fold("derivative-bound-" + std::to_string(j + 1), outcomes));
    }
    return out;
}

BoundednessReport matrosov_boundedness(const MatrosovProblem& prob, const SystemDef& sys,
                                       const GridSpec& grid) {
    check_annulus(prob, sys);
    BoundednessReport r;
    r.gamma = prob.gamma;
    const auto nodes = annulus_nodes(prob, sys, grid);
    for (const auto& x : nodes) {
        for (double t : check_times(sys, grid)) {
            for (const auto& W : prob.W) r.max_abs_W = std::max(r.max_abs_W, std::abs(W(x, t)));
            for (const auto& p : prob.phi) {
                r.max_abs_phi = std::max(r.max_abs_phi, std::abs(p.eval({x, t})));
            }
        }
    }
    r.within_gamma = r.max_abs_W <= prob.gamma && r.max_abs_phi <= prob.gamma;
    return r;
}

}  // namespace incred
