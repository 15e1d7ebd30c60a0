#include "incred/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "incred/error.hpp"
#include "incred/format.hpp"
#include "incred/reduction.hpp"

namespace incred {

Strategy parse_strategy(std::string_view name) {
    if (name == "reduced-descent") return Strategy::ReducedDescent;
    if (name == "midpoint") return Strategy::Midpoint;
    if (name == "random-extreme") return Strategy::RandomExtreme;
    throw std::invalid_argument("unknown strategy '" + std::string(name) +
                                "' (expected reduced-descent, midpoint or random-extreme)");
}

const char* to_string(Strategy s) noexcept {
    switch (s) {
        case Strategy::ReducedDescent: return "reduced-descent";
        case Strategy::Midpoint: return "midpoint";
        case Strategy::RandomExtreme: return "random-extreme";
    }
    return "?";
}

double Trajectory::final_norm() const { return samples.empty() ? 0.0 : norm2(samples.back().x); }

namespace {

class Selector {
public:
    Selector(const SystemDef& sys, Strategy s, std::uint64_t seed)
        : sys_(sys), strategy_(s), rng_(seed) {
        if (s == Strategy::ReducedDescent && !sys.V) {
            throw SemanticError("reduced-descent selection needs a V");
        }
    }

    std::vector<double> select(std::span<const double> x, double t) {
        const Box F = sys_.F.eval(x, t);
        if (F.is_empty()) {
            throw SemanticError("F is empty at x=(" + format_reals(x, ", ") + "), t=" +
                                format_real(t));
        }
        switch (strategy_) {
            case Strategy::Midpoint: return F.center();
            case Strategy::RandomExtreme: {
                const std::uint64_t bits = rng_();
                std::vector<double> q(F.dims());
                for (std::size_t i = 0; i < q.size(); ++i) {
                    q[i] = ((bits >> i) & 1u) ? F[i].hi() : F[i].lo();
                }
                return q;
            }
            case Strategy::ReducedDescent: break;
        }
        Box target = reduce_collection(sys_.F, sys_.U, x, t);
        if (target.is_empty()) target = F;
        const auto p = eval_gradient(*sys_.V, x, t).center();
        std::vector<double> q(target.dims());
        for (std::size_t i = 0; i < q.size(); ++i) {
            if (p[i] > 0.0) {
                q[i] = target[i].lo();
            } else if (p[i] < 0.0) {
                q[i] = target[i].hi();
            } else {
                q[i] = target[i].mid();
            }
        }
        return q;
    }

private:
    const SystemDef& sys_;
    Strategy strategy_;
    std::mt19937_64 rng_;
};

double value_of_V(const SystemDef& sys, std::span<const double> x, double t) {
    return sys.V ? (*sys.V)(x, t) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

Trajectory integrate(const SystemDef& sys, std::span<const double> x0, double t0, double h,
                     double T, Strategy strategy, std::uint64_t seed) {
    if (x0.size() != sys.n) throw SemanticError("x0 has the wrong dimension");
    if (!(h > 0.0)) throw SemanticError("step h must be positive");
    if (!(T > t0)) throw SemanticError("horizon T must exceed t0");
    if (!contains(sys.domain, x0)) throw SemanticError("x0 lies outside the domain");

    Trajectory traj;
    traj.t0 = t0;
    traj.h = h;
    traj.T = T;
    traj.strategy = strategy;
    traj.seed = seed;

    const auto steps = static_cast<std::size_t>(std::llround((T - t0) / h));
    traj.samples.reserve(steps + 1);
    Selector sel(sys, strategy, seed);

    std::vector<double> x(x0.begin(), x0.end());
    for (std::size_t k = 0;; ++k) {
        const double t = t0 + static_cast<double>(k) * h;
        Sample s;
        s.t = t;
        s.x = x;
        s.q = sel.select(x, t);
        s.V = value_of_V(sys, x, t);
        if (k == steps) {
            traj.samples.push_back(std::move(s));
            break;
        }
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += h * s.q[i];
        traj.samples.push_back(std::move(s));
        if (!contains(sys.domain, x)) {
            traj.exited_domain = true;
            Sample last;
            last.t = t0 + static_cast<double>(k + 1) * h;
            last.x = x;
            last.q.assign(x.size(), 0.0);
            last.V = value_of_V(sys, x, last.t);
            traj.samples.push_back(std::move(last));
            break;
        }
    }
    return traj;
}

std::string trajectory_csv(const Trajectory& traj) {
    std::ostringstream os;
    const std::size_t n = traj.samples.empty() ? 0 : traj.samples.front().x.size();
    os << 't';
    for (std::size_t i = 1; i <= n; ++i) os << ",x" << i;
    for (std::size_t i = 1; i <= n; ++i) os << ",q" << i;
    os << ",V\n";
    for (const auto& s : traj.samples) {
        os << format_real(s.t) << ',' << format_reals(s.x) << ',' << format_reals(s.q) << ','
           << format_real(s.V) << '\n';
    }
    return os.str();
}

MembershipReport check_reduction_membership(const Trajectory& traj, const SystemDef& sys,
                                            double tol) {
    MembershipReport r;
    r.tol = tol;
    r.steps = traj.steps();
    std::vector<double> dq;
    for (std::size_t k = 0; k < r.steps; ++k) {
        const auto& a = traj.samples[k];
        const auto& b = traj.samples[k + 1];
        dq.resize(a.x.size());
        double scale = 1.0;
        for (std::size_t i = 0; i < dq.size(); ++i) {
            dq[i] = (b.x[i] - a.x[i]) / traj.h;
            scale = std::max(scale, std::abs(dq[i]));
        }
        const Box reduced = reduce_collection(sys.F, sys.U, a.x, a.t);
        const double dist = distance(dq, reduced);
        if (dist > tol * scale) ++r.violations;
        if (std::isfinite(dist)) r.max_distance = std::max(r.max_distance, dist);
        if (!contains(sys.F.eval(a.x, a.t), a.q)) ++r.selection_violations;
    }
    r.fraction = r.steps == 0 ? 0.0 : static_cast<double>(r.violations) / static_cast<double>(r.steps);
    r.pass = r.fraction <= kMembershipBudget && r.selection_violations == 0;
    return r;
}

DescentReport check_lyapunov_descent(const Trajectory& traj, const SystemDef& sys,
                                     const expr::ScalarExpr& W) {
    if (!sys.V) throw SemanticError("descent check needs a V");
    DescentReport r;
    r.steps = traj.steps();
    r.worst_gap = r.steps == 0 ? 0.0 : -HUGE_VAL;
    const double h = traj.h;
    const double slack = h * (10.0 * h);
    for (std::size_t k = 0; k < r.steps; ++k) {
        const auto& a = traj.samples[k];
        const auto& b = traj.samples[k + 1];
        const double dV = b.V - a.V;
        const double w = W.eval({a.x, a.t});
        if (dV > -h * w + slack) ++r.violations;
        if (dV > slack) ++r.monotone_violations;
        r.worst_gap = std::max(r.worst_gap, dV / h + w);
    }
    r.pass = r.violations == 0 && r.monotone_violations == 0;
    return r;
}

ConvergenceReport check_partial_convergence(const Trajectory& traj, const expr::ScalarExpr& W,
                                            double tail_fraction, double threshold) {
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0)) {
        throw std::invalid_argument("tail_fraction must lie in (0, 1)");
    }
    ConvergenceReport r;
    r.tail_fraction = tail_fraction;
    r.threshold = threshold;
    const std::size_t total = traj.samples.size();
    r.tail_samples = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(total))));
    r.tail_samples = std::min(r.tail_samples, total);
    r.tail_max = total == 0 ? 0.0 : -HUGE_VAL;
    for (std::size_t k = total - r.tail_samples; k < total; ++k) {
        const auto& s = traj.samples[k];
        r.tail_max = std::max(r.tail_max, W.eval({s.x, s.t}));
    }
    r.pass = r.tail_max < threshold;
    return r;
}

}  // namespace incred
