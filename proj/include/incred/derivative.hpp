#pragma once

#include <compare>
#include <span>
#include <string>

#include "incred/interval.hpp"
#include "incred/setmap.hpp"

namespace incred {

/// A real number or the marker -inf used for derivatives over an empty
/// reduced set. Kept apart from IEEE infinity so reports are unambiguous.
class ExtendedReal {
public:
    ExtendedReal() = default;
    ExtendedReal(double v) : value_(v) {}  // NOLINT(google-explicit-constructor)
    static ExtendedReal neg_inf() noexcept {
        ExtendedReal r;
        r.neg_inf_ = true;
        return r;
    }

    bool is_neg_inf() const noexcept { return neg_inf_; }
    /// Throws std::logic_error on -inf.
    double value() const;
    /// The real value, or -HUGE_VAL for the marker.
    double as_double() const noexcept;

    std::string to_string() const;

    friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) noexcept;
    friend std::partial_ordering operator<=>(const ExtendedReal& a, const ExtendedReal& b) noexcept;

private:
    double value_ = 0.0;
    bool neg_inf_ = false;
};

enum class DerivativeKind { PadenSastry, BacciottiCeragioli, UGeneralized };

const char* to_string(DerivativeKind k) noexcept;

struct DerivativeValue {
    DerivativeKind kind = DerivativeKind::UGeneralized;
    /// Largest value of the derivative set; -inf when the set is empty.
    ExtendedReal max;
    /// The derivative set itself for the two baselines (possibly empty);
    /// for the U-generalized derivative the point {max}, or empty.
    Interval range;
    bool empty_reduction = false;
};

/// max over p in P, q in Q of <p, (q, 1)>. P has one more axis than Q.
double bilinear_maxmax(const Box& P, const Box& Q);
/// min over p in P of max over q in Q of <p, (q, 1)>.
double bilinear_minmax(const Box& P, const Box& Q);

/// Dispatch on V's regularity given the gradient box and the reduced set.
DerivativeValue u_generalized_from_boxes(const Box& gradV, bool regular, const Box& reduced);

DerivativeValue u_generalized_derivative(const RegularFunctionSpec& V, const PiecewiseBoxMap& F,
                                         std::span<const RegularFunctionSpec> Us,
                                         std::span<const double> x, double t);

DerivativeValue bc_from_boxes(const Box& gradV, const Box& F);
DerivativeValue ps_from_boxes(const Box& gradV, const Box& F);

/// Requires V.regular; throws SemanticError otherwise.
DerivativeValue baseline_bc_max(const RegularFunctionSpec& V, const PiecewiseBoxMap& F,
                                std::span<const double> x, double t);
DerivativeValue baseline_ps_interval(const RegularFunctionSpec& V, const PiecewiseBoxMap& F,
                                     std::span<const double> x, double t);

}  // namespace incred
