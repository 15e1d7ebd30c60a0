#include "incred/report.hpp"

#include <cmath>

#include "incred/format.hpp"

namespace incred::report {

Json real(double v) {
    if (std::isfinite(v)) return v == 0.0 ? Json(0.0) : Json(v);
    return format_real(v);
}

Json real(const ExtendedReal& v) { return v.is_neg_inf() ? Json("-inf") : real(v.value()); }

Json reals(std::span<const double> v) {
    Json a = Json::array();
    for (double x : v) a.push_back(real(x));
    return a;
}

Json box(const Box& b) {
    if (b.is_empty()) return Json{{"empty", true}};
    return Json{{"lo", reals(b.lower())}, {"hi", reals(b.upper())}};
}

Json interval(const Interval& i) {
    if (i.is_empty()) return Json{{"empty", true}};
    return Json{{"lo", real(i.lo())}, {"hi", real(i.hi())}};
}

Json witness(const Witness& w) {
    Json j{{"x", reals(w.at.x)}, {"t", real(w.at.t)}};
    if (!w.z.empty()) j["z"] = reals(w.z);
    j["lhs"] = real(w.lhs);
    j["rhs"] = real(w.rhs);
    j["margin"] = real(w.margin);
    if (!w.detail.empty()) j["detail"] = w.detail;
    return j;
}

Json condition(const ConditionResult& c) {
    Json j{{"id", c.id},
           {"verdict", to_string(c.verdict)},
           {"nodes_checked", c.nodes_checked},
           {"failures", c.failures}};
    j["worst"] = c.worst ? witness(*c.worst) : Json(nullptr);
    return j;
}

Json certificate(const Certificate& c) {
    Json j;
    j["verdict"] = to_string(c.verdict);
    j["scope"] = "certified on grid";
    j["condition"] = c.condition;
    if (c.worst) {
        j["worst_point"] = Json{{"x", reals(c.worst->at.x)}, {"t", real(c.worst->at.t)}};
        if (!c.worst->z.empty()) j["worst_point"]["z"] = reals(c.worst->z);
        j["margin"] = real(c.worst->margin);
    } else {
        j["worst_point"] = nullptr;
        j["margin"] = nullptr;
    }
    Json tol = Json::object();
    for (const auto& [k, v] : c.tolerances) tol[k] = real(v);
    j["tolerances"] = tol;
    Json grid{{"axis_nodes", c.grid.axis_nodes},
              {"state_nodes", c.grid.state_nodes},
              {"time_nodes", reals(c.grid.time_nodes)}};
    j["grid"] = grid;
    Json conds = Json::array();
    for (const auto& cond : c.conditions) conds.push_back(condition(cond));
    j["conditions"] = conds;
    j["notes"] = c.notes;
    return j;
}

Json invariance(const InvarianceReport& r) {
    Json e = Json::array();
    for (const auto& x : r.e_nodes) e.push_back(reals(x));
    Json cands = Json::array();
    for (const auto& c : r.candidates) {
        cands.push_back(Json{{"x", reals(c.x)}, {"F", box(c.F)}, {"equilibrium", c.equilibrium}});
    }
    return Json{{"zero_tol", real(r.zero_tol)},
                {"e_node_count", r.e_nodes.size()},
                {"empty_reduction_nodes", r.empty_nodes},
                {"e_nodes", e},
                {"semidefinite", certificate(r.semidefinite)},
                {"candidates", cands},
                {"note", "equilibrium screening (0 in F(x)) is a necessary-condition check"}};
}

Json derivative(const DerivativeValue& d) {
    return Json{{"kind", to_string(d.kind)},
                {"max", real(d.max)},
                {"range", interval(d.range)},
                {"empty_reduction", d.empty_reduction}};
}

Json gradient_validation(const GradientValidation& g) {
    return Json{{"declared", box(g.declared)},
                {"estimate_hull", box(g.estimate_hull)},
                {"fraction_inside", real(g.fraction_inside)},
                {"samples", g.samples},
                {"verdict", g.pass ? "PASS" : "FAIL"}};
}

Json membership(const MembershipReport& r) {
    return Json{{"tol", real(r.tol)},
                {"steps", r.steps},
                {"violations", r.violations},
                {"fraction", real(r.fraction)},
                {"max_distance", real(r.max_distance)},
                {"selection_violations", r.selection_violations},
                {"verdict", r.pass ? "PASS" : "FAIL"}};
}

Json descent(const DescentReport& r) {
    return Json{{"steps", r.steps},
                {"violations", r.violations},
                {"worst_gap", real(r.worst_gap)},
                {"monotone_violations", r.monotone_violations},
                {"verdict", r.pass ? "PASS" : "FAIL"}};
}

Json convergence(const ConvergenceReport& r) {
    return Json{{"tail_fraction", real(r.tail_fraction)},
                {"tail_samples", r.tail_samples},
                {"tail_max", real(r.tail_max)},
                {"threshold", real(r.threshold)},
                {"verdict", r.pass ? "PASS" : "FAIL"}};
}

Json boundedness(const BoundednessReport& r) {
    return Json{{"max_abs_W", real(r.max_abs_W)},
                {"max_abs_phi", real(r.max_abs_phi)},
                {"gamma", real(r.gamma)},
                {"gamma_required", real(std::max(r.max_abs_W, r.max_abs_phi))},
                {"within_gamma", r.within_gamma}};
}

Json constants(const MatrosovConstants& c) {
    return Json{{"verdict", to_string(c.certificate.verdict)},
                {"K", reals(c.K)},
                {"epsilon", real(c.epsilon)},
                {"zeta", real(c.zeta)},
                {"verify_nodes", c.verify_nodes},
                {"verify_margin", real(c.verify_margin)},
                {"notes", c.certificate.notes}};
}

}  // namespace incred::report
