#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "incred/interval.hpp"

namespace incred::expr {

/// Evaluation point: state x, time t and (for Matrosov auxiliary functions)
/// the auxiliary argument z.
struct Env {
    std::span<const double> x;
    double t = 0.0;
    std::span<const double> z = {};
};

struct ScalarNode;
struct SetNode;
struct GuardNode;

/// Immutable scalar expression over x1..x9, z1..z9, t and named parameters.
class ScalarExpr {
public:
    /// The literal 0.
    ScalarExpr();
    static ScalarExpr constant(double v);

    double eval(const Env& env) const;
    double operator()(std::span<const double> x, double t = 0.0) const {
        return eval(Env{x, t});
    }

    std::string to_string() const;
    bool depends_on_time() const;
    /// Largest state index referenced (1-based), 0 if none.
    std::size_t max_state_index() const;
    std::size_t max_z_index() const;

    explicit ScalarExpr(std::shared_ptr<const ScalarNode> node) : node_(std::move(node)) {}
    const std::shared_ptr<const ScalarNode>& node() const noexcept { return node_; }

private:
    std::shared_ptr<const ScalarNode> node_;
};

/// Immutable interval-valued expression: singletons, interval literals,
/// hulls, Minkowski sums and scalar multiples.
class SetExpr {
public:
    SetExpr();

    /// Throws EvalError when an interval literal evaluates with lo > hi.
    Interval eval(const Env& env) const;

    std::string to_string() const;
    bool depends_on_time() const;
    std::size_t max_state_index() const;

    explicit SetExpr(std::shared_ptr<const SetNode> node) : node_(std::move(node)) {}
    const std::shared_ptr<const SetNode>& node() const noexcept { return node_; }

private:
    std::shared_ptr<const SetNode> node_;
};

/// Boolean combination of exact comparisons between scalar expressions.
class GuardExpr {
public:
    /// The catch-all guard `otherwise`.
    GuardExpr();

    bool eval(const Env& env) const;
    /// True for the literal `otherwise` / `true`.
    bool is_catch_all() const;

    std::string to_string() const;
    bool depends_on_time() const;
    std::size_t max_state_index() const;

    explicit GuardExpr(std::shared_ptr<const GuardNode> node) : node_(std::move(node)) {}

private:
    std::shared_ptr<const GuardNode> node_;
};

/// Names visible to the parser. Parameters are named scalar expressions
/// (typically functions of t) that later expressions may reference.
struct Symbols {
    std::size_t state_dims = 9;
    std::size_t z_dims = 0;
    std::vector<std::pair<std::string, ScalarExpr>> params;

    const ScalarExpr* find_param(std::string_view name) const;
};

/// All parse functions throw ParseError with the byte offset of the problem.
ScalarExpr parse_scalar(std::string_view src, const Symbols& symbols = {});
SetExpr parse_set(std::string_view src, const Symbols& symbols = {});
GuardExpr parse_guard(std::string_view src, const Symbols& symbols = {});

/// sgn1(y) = 0 on (-1, 1), sgn(y) elsewhere.
double sgn1(double y) noexcept;
double sgn(double y) noexcept;

/// Denominators with magnitude below this bound are rejected at evaluation.
inline constexpr double kMinDenominator = 1e-300;

}  // namespace incred::expr
