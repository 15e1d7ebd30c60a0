#pragma once

#include <cstddef>
#include <vector>

#include "incred/interval.hpp"

namespace incred {

/// A state paired with a time instant.
struct StatePoint {
    std::vector<double> x;
    double t = 0.0;
};

/// Tensor grid over a domain box.
///
/// Each axis gets `counts[i]` uniform nodes spanning the domain, plus the
/// explicit `nodes[i]` and the guard-surface coordinates `include[i]`.
/// Include coordinates are kept verbatim so that guards written with exact
/// equality (|x1| == 1) are actually hit. Nodes outside the domain are
/// dropped; the rest are sorted and deduplicated.
struct GridSpec {
    std::vector<std::size_t> counts;
    std::vector<std::vector<double>> nodes;
    std::vector<std::vector<double>> include;
    std::vector<double> time_nodes{0.0};

    std::vector<std::vector<double>> axis_nodes(const Box& domain) const;
    /// Cartesian product of axis_nodes in lexicographic order (last axis
    /// fastest).
    std::vector<std::vector<double>> state_nodes(const Box& domain) const;
    /// Same grid with (count - 1) * factor + 1 uniform nodes per axis.
    GridSpec refined(std::size_t factor) const;
};

std::vector<double> linspace(double lo, double hi, std::size_t count);

std::vector<std::vector<double>> cartesian_product(const std::vector<std::vector<double>>& axes);

}  // namespace incred
