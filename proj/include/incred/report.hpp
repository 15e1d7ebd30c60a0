#pragma once

#include <vector>

#include "json.hpp"

#include "incred/certify.hpp"
#include "incred/derivative.hpp"
#include "incred/interval.hpp"
#include "incred/reduction.hpp"
#include "incred/setmap.hpp"
#include "incred/simulate.hpp"

namespace incred::report {

using Json = nlohmann::ordered_json;

/// Non-finite reals become the strings "inf", "-inf", "nan".
Json real(double v);
Json real(const ExtendedReal& v);
Json reals(std::span<const double> v);
/// {"empty": true} or {"lo": [...], "hi": [...]}.
Json box(const Box& b);
Json interval(const Interval& i);

Json witness(const Witness& w);
Json condition(const ConditionResult& c);
Json certificate(const Certificate& c);
Json invariance(const InvarianceReport& r);
Json derivative(const DerivativeValue& d);
Json gradient_validation(const GradientValidation& g);
Json membership(const MembershipReport& r);
Json descent(const DescentReport& r);
Json convergence(const ConvergenceReport& r);
Json boundedness(const BoundednessReport& r);
Json constants(const MatrosovConstants& c);

}  // namespace incred::report
