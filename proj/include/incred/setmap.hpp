#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "incred/expr.hpp"
#include "incred/interval.hpp"

namespace incred {

/// One guarded case of a piecewise map: when `guard` holds, the value is the
/// box whose axes are the interval expressions in `values`.
struct Piece {
    expr::GuardExpr guard;
    std::vector<expr::SetExpr> values;
};

/// Ordered, first-match-wins piecewise map (x, t) -> box.
///
/// The last piece must be the catch-all `otherwise`, so evaluation is total.
/// Used for inclusions F (output dimension n) and declared Clarke gradients
/// (output dimension n + 1, the last axis being the time component).
class PiecewiseBoxMap {
public:
    PiecewiseBoxMap() = default;
    /// Throws SemanticError on a missing catch-all or a wrong value count.
    PiecewiseBoxMap(std::size_t state_dims, std::size_t out_dims, std::vector<Piece> pieces);

    std::size_t state_dims() const noexcept { return state_dims_; }
    std::size_t out_dims() const noexcept { return out_dims_; }
    bool time_dependent() const noexcept { return time_dependent_; }
    const std::vector<Piece>& pieces() const noexcept { return pieces_; }

    /// Index of the first piece whose guard holds.
    std::size_t select(std::span<const double> x, double t) const;
    Box eval(std::span<const double> x, double t) const;

private:
    std::size_t state_dims_ = 0;
    std::size_t out_dims_ = 0;
    bool time_dependent_ = false;
    std::vector<Piece> pieces_;
};

/// Value of the first matching piece; an empty box is a legal value.
Box eval_map(const PiecewiseBoxMap& m, std::span<const double> x, double t);

/// Scalar function with a declared piecewise Clarke gradient in R^{n+1}
/// (state axes, then the time axis) and a declared regularity flag.
struct RegularFunctionSpec {
    std::string name;
    expr::ScalarExpr value;
    PiecewiseBoxMap gradient;
    bool regular = true;

    std::size_t state_dims() const noexcept { return gradient.state_dims(); }
    bool time_dependent() const;
    double operator()(std::span<const double> x, double t) const { return value.eval({x, t}); }
};

/// Declared gradient box at (x, t). Throws SemanticError if it is empty, or
/// if a time-independent function declares a nondegenerate or nonzero time
/// component.
Box eval_gradient(const RegularFunctionSpec& f, std::span<const double> x, double t);

/// Textual piece used by the builders below: guard source and one set-expression
/// source per output axis.
struct PieceSource {
    std::string guard;
    std::vector<std::string> values;
};

/// Parses a piecewise map from source text.
PiecewiseBoxMap make_map(std::size_t state_dims, std::size_t out_dims,
                         const std::vector<PieceSource>& pieces,
                         const expr::Symbols& symbols = {});

/// Builds a function spec. Gradient pieces may list n values (time component
/// taken as {0}) or n + 1 values.
RegularFunctionSpec make_function(std::string name, std::size_t state_dims,
                                  std::string_view value,
                                  const std::vector<PieceSource>& gradient, bool regular = true,
                                  const expr::Symbols& symbols = {});

struct GradientValidation {
    Box declared;
    Box estimate_hull;
    double fraction_inside = 0.0;
    std::size_t samples = 0;
    bool pass = false;
};

inline constexpr double kGradientInflation = 1e-4;
inline constexpr double kGradientPassFraction = 0.99;

/// Finite-difference check of a declared Clarke gradient. Draws `samples`
/// points uniformly from the (n+1)-ball of `radius` around (x, t), estimates
/// the classical gradient at each by central differences with step
/// radius / 100, and counts how many land in the declared box at (x, t)
/// inflated by kGradientInflation.
GradientValidation validate_gradient(const RegularFunctionSpec& f, std::span<const double> x,
                                     double t, double radius, std::size_t samples,
                                     std::uint64_t seed = 0x5eed);

}  // namespace incred
