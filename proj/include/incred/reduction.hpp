#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "incred/grid.hpp"
#include "incred/interval.hpp"
#include "incred/setmap.hpp"

namespace incred {

/// Result of reducing a box F(x, t) against one or more gradient boxes.
struct ReducedValue {
    Box base;
    /// State axes pinned to zero (union over the collection), ascending.
    std::vector<std::size_t> constrained_axes;
    /// Set when some gradient box is nondegenerate along the time axis. No
    /// q in F can then satisfy <p, (q, 1)> constant over the gradient, so
    /// the result is empty.
    bool time_obstruction = false;
    Box result;
};

/// Pinches `base` (dimension n) against one gradient box (dimension n + 1).
///
/// Every q in the result has <p, (q, 1)> identical for all p in the gradient
/// box. For an axis-aligned box that holds iff q_i = 0 on each nondegenerate
/// state axis and the time axis is degenerate.
ReducedValue reduce_with_gradient(const Box& base, const Box& gradient);

/// Intersection of the single reductions, i.e. a pinch on the union of the
/// constrained axes.
ReducedValue reduce_with_gradients(const Box& base, std::span<const Box> gradients);

ReducedValue reduce_once(const PiecewiseBoxMap& F, const RegularFunctionSpec& U,
                         std::span<const double> x, double t);

ReducedValue reduce_collection_detail(const PiecewiseBoxMap& F,
                                      std::span<const RegularFunctionSpec> Us,
                                      std::span<const double> x, double t);

/// The reduced set F~(x, t). With an empty collection this is F(x, t).
Box reduce_collection(const PiecewiseBoxMap& F, std::span<const RegularFunctionSpec> Us,
                      std::span<const double> x, double t);

struct ReductionRow {
    StatePoint at;
    ReducedValue value;
};

std::vector<ReductionRow> tabulate_reduction(const PiecewiseBoxMap& F,
                                             std::span<const RegularFunctionSpec> Us,
                                             std::span<const StatePoint> points);

/// Columns: x1..xn, t, F_lo1..n, F_hi1..n, Fred_lo1..n, Fred_hi1..n,
/// empty. Endpoints of empty boxes are written as "nan".
std::string reduction_csv(std::span<const ReductionRow> rows, std::size_t n);

/// Human-readable aligned table of the same data.
std::string reduction_table(std::span<const ReductionRow> rows);

}  // namespace incred
