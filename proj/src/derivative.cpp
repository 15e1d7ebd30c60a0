#include "incred/derivative.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "incred/error.hpp"
#include "incred/format.hpp"
#include "incred/reduction.hpp"

namespace incred {

double ExtendedReal::value() const {
    if (neg_inf_) throw std::logic_error("ExtendedReal: value() of -inf");
    return value_;
}

double ExtendedReal::as_double() const noexcept { return neg_inf_ ? -HUGE_VAL : value_; }

std::string ExtendedReal::to_string() const { return neg_inf_ ? "-inf" : format_real(value_); }

bool operator==(const ExtendedReal& a, const ExtendedReal& b) noexcept {
    if (a.neg_inf_ || b.neg_inf_) return a.neg_inf_ == b.neg_inf_;
    return a.value_ == b.value_;
}

std::partial_ordering operator<=>(const ExtendedReal& a, const ExtendedReal& b) noexcept {
    if (a.neg_inf_ && b.neg_inf_) return std::partial_ordering::equivalent;
    if (a.neg_inf_) return std::partial_ordering::less;
    if (b.neg_inf_) return std::partial_ordering::greater;
    return a.value_ <=> b.value_;
}

const char* to_string(DerivativeKind k) noexcept {
    switch (k) {
        case DerivativeKind::PadenSastry: return "PS-interval";
        case DerivativeKind::BacciottiCeragioli: return "BC-interval";
        case DerivativeKind::UGeneralized: return "U-generalized";
    }
    return "?";
}

namespace {

void check_pair(const Box& P, const Box& Q, const char* who) {
    if (P.dims() != Q.dims() + 1) {
        throw std::invalid_argument(std::string(who) + ": gradient box must have one more axis");
    }
    if (P.is_empty() || Q.is_empty()) throw std::invalid_argument(std::string(who) + ": empty box");
}

double max4(double a, double b, double c, double d) { return std::max({a, b, c, d}); }

// max over q in Q_i of p q, as a function of p: convex, kink at 0.
double g_max(double p, const Interval& q) { return std::max(p * q.lo(), p * q.hi()); }
// min over q in Q_i of p q: concave, kink at 0.
double g_min(double p, const Interval& q) { return std::min(p * q.lo(), p * q.hi()); }

template <class G, class Pick>
double extremize(const Interval& P, const Interval& Q, G g, Pick pick) {
    double best = pick(g(P.lo(), Q), g(P.hi(), Q));
    if (P.contains(0.0)) best = pick(best, g(0.0, Q));
    return best;
}

}  // namespace

double bilinear_maxmax(const Box& P, const Box& Q) {
    check_pair(P, Q, "bilinear_maxmax");
    const std::size_t n = Q.dims();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Interval& p = P[i];
        const Interval& q = Q[i];
        total += max4(p.lo() * q.lo(), p.lo() * q.hi(), p.hi() * q.lo(), p.hi() * q.hi());
    }
    return total + P[n].hi();
}

double bilinear_minmax(const Box& P, const Box& Q) {
    check_pair(P, Q, "bilinear_minmax");
    const std::size_t n = Q.dims();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += extremize(P[i], Q[i], g_max, [](double a, double b) { return std::min(a, b); });
    }
    return total + P[n].lo();
}

DerivativeValue u_generalized_from_boxes(const Box& gradV, bool regular, const Box& reduced) {
    DerivativeValue d;
    d.kind = DerivativeKind::UGeneralized;
    if (reduced.is_empty()) {
        d.max = ExtendedReal::neg_inf();
        d.range = Interval::empty();
        d.empty_reduction = true;
        return d;
    }
    const double v = regular ? bilinear_minmax(gradV, reduced) : bilinear_maxmax(gradV, reduced);
    d.max = v;
    d.range = Interval::point(v);
    return d;
}

DerivativeValue u_generalized_derivative(const RegularFunctionSpec& V, const PiecewiseBoxMap& F,
                                         std::span<const RegularFunctionSpec> Us,
                                         std::span<const double> x, double t) {
    const Box reduced = reduce_collection(F, Us, x, t);
    return u_generalized_from_boxes(eval_gradient(V, x, t), V.regular, reduced);
}

DerivativeValue bc_from_boxes(const Box& gradV, const Box& F) {
    DerivativeValue d;
    d.kind = DerivativeKind::BacciottiCeragioli;
    const Box G = reduce_with_gradient(F, gradV).result;
    if (G.is_empty()) {
        d.max = ExtendedReal::neg_inf();
        d.range = Interval::empty();
        d.empty_reduction = true;
        return d;
    }
    // <p, (q, 1)> is the same for every p in gradV when q is in G, so the
    // center stands in for all of them.
    const auto p = gradV.center();
    const std::size_t n = F.dims();
    Interval acc = Interval::point(0.0);
    for (std::size_t i = 0; i < n; ++i) acc = acc + scale(p[i], G[i]);
    acc = acc + Interval::point(p[n]);
    d.range = acc;
    d.max = acc.hi();
    return d;
}

DerivativeValue ps_from_boxes(const Box& gradV, const Box& F) {
    DerivativeValue d;
    d.kind = DerivativeKind::PadenSastry;
    if (F.is_empty()) {
        d.max = ExtendedReal::neg_inf();
        d.range = Interval::empty();
        return d;
    }
    check_pair(gradV, F, "baseline_ps_interval");
    const std::size_t n = F.dims();
    double sup_m = gradV[n].hi();
    double inf_M = gradV[n].lo();
    for (std::size_t i = 0; i < n; ++i) {
        sup_m += extremize(gradV[i], F[i], g_min, [](double a, double b) { return std::max(a, b); });
        inf_M += extremize(gradV[i], F[i], g_max, [](double a, double b) { return std::min(a, b); });
    }
    if (sup_m > inf_M) {
        d.max = ExtendedReal::neg_inf();
        d.range = Interval::empty();
        return d;
    }
    d.range = Interval(sup_m, inf_M);
    d.max = inf_M;
    return d;
}

DerivativeValue baseline_bc_max(const RegularFunctionSpec& V, const PiecewiseBoxMap& F,
                                std::span<const double> x, double t) {
    if (!V.regular) throw SemanticError("baseline_bc_max: " + V.name + " is not regular");
    return bc_from_boxes(eval_gradient(V, x, t), F.eval(x, t));
}

DerivativeValue baseline_ps_interval(const RegularFunctionSpec& V, const PiecewiseBoxMap& F,
                                     std::span<const double> x, double t) {
    return ps_from_boxes(eval_gradient(V, x, t), F.eval(x, t));
}

}  // namespace incred
