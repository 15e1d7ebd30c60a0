#include "incred/reduction.hpp"

#include <algorithm>
#include <array>
#include <sstream>
#include <stdexcept>

#include "incred/format.hpp"

namespace incred {

namespace {

Box pinch(const Box& base, const std::vector<std::size_t>& axes) {
    if (base.is_empty()) return base;
    std::vector<Interval> out = base.axes();
    for (std::size_t i : axes) {
        if (!out[i].contains(0.0)) return Box::empty(base.dims());
        out[i] = Interval::point(0.0);
    }
    return Box(std::move(out));
}

}  // namespace

ReducedValue reduce_with_gradients(const Box& base, std::span<const Box> gradients) {
    const std::size_t n = base.dims();
    ReducedValue r;
    r.base = base;
    std::vector<bool> mask(n, false);
    for (const Box& g : gradients) {
        if (g.dims() != n + 1) {
            throw std::invalid_argument("gradient box has dimension " + std::to_string(g.dims()) +
                                        ", expected " + std::to_string(n + 1));
        }
        for (std::size_t i : direction_axes(g)) {
            if (i == n) {
                r.time_obstruction = true;
            } else {
                mask[i] = true;
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (mask[i]) r.constrained_axes.push_back(i);
    }
    r.result = r.time_obstruction ? Box::empty(n) : pinch(base, r.constrained_axes);
    return r;
}

ReducedValue reduce_with_gradient(const Box& base, const Box& gradient) {
    return reduce_with_gradients(base, std::span<const Box>(&gradient, 1));
}

ReducedValue reduce_once(const PiecewiseBoxMap& F, const RegularFunctionSpec& U,
                         std::span<const double> x, double t) {
    return reduce_with_gradient(F.eval(x, t), eval_gradient(U, x, t));
}

ReducedValue reduce_collection_detail(const PiecewiseBoxMap& F,
                                      std::span<const RegularFunctionSpec> Us,
                                      std::span<const double> x, double t) {
    std::vector<Box> grads;
    grads.reserve(Us.size());
    for (const auto& u : Us) grads.push_back(eval_gradient(u, x, t));
    return reduce_with_gradients(F.eval(x, t), grads);
}

Box reduce_collection(const PiecewiseBoxMap& F, std::span<const RegularFunctionSpec> Us,
                      std::span<const double> x, double t) {
    return reduce_collection_detail(F, Us, x, t).result;
}

std::vector<ReductionRow> tabulate_reduction(const PiecewiseBoxMap& F,
                                             std::span<const RegularFunctionSpec> Us,
                                             std::span<const StatePoint> points) {
    std::vector<ReductionRow> rows;
    rows.reserve(points.size());
    for (const auto& p : points) {
        rows.push_back({p, reduce_collection_detail(F, Us, p.x, p.t)});
    }
    return rows;
}

namespace {

void put_bounds(std::ostream& os, const Box& b, bool upper) {
    for (std::size_t i = 0; i < b.dims(); ++i) {
        os << ',';
        if (b.is_empty()) {
            os << "nan";
        } else {
            os << format_real(upper ? b[i].hi() : b[i].lo());
        }
    }
}

}  // namespace

std::string reduction_csv(std::span<const ReductionRow> rows, std::size_t n) {
    std::ostringstream os;
    for (std::size_t i = 1; i <= n; ++i) os << 'x' << i << ',';
    os << 't';
    for (const char* col : {"F_lo", "F_hi", "Fred_lo", "Fred_hi"}) {
        for (std::size_t i = 1; i <= n; ++i) os << ',' << col << i;
    }
    os << ",empty\n";
    for (const auto& row : rows) {
        os << format_reals(row.at.x) << ',' << format_real(row.at.t);
        put_bounds(os, row.value.base, false);
        put_bounds(os, row.value.base, true);
        put_bounds(os, row.value.result, false);
        put_bounds(os, row.value.result, true);
        os << ',' << (row.value.result.is_empty() ? 1 : 0) << '\n';
    }
    return os.str();
}

std::string reduction_table(std::span<const ReductionRow> rows) {
    std::vector<std::array<std::string, 4>> cells;
    std::array<std::size_t, 4> width{5, 1, 6, 7};
    for (const auto& row : rows) {
        std::array<std::string, 4> c{
            "(" + format_reals(row.at.x, ", ") + ")",
            format_real(row.at.t),
            to_string(row.value.base),
            to_string(row.value.result),
        };
        if (row.value.time_obstruction) c[3] += "  (time axis)";
        for (std::size_t k = 0; k < 4; ++k) width[k] = std::max(width[k], c[k].size());
        cells.push_back(std::move(c));
    }
    std::ostringstream os;
    auto line = [&](const std::array<std::string, 4>& c) {
        for (std::size_t k = 0; k < 4; ++k) {
            os << c[k];
            if (k + 1 < 4) os << std::string(width[k] - c[k].size() + 2, ' ');
        }
        os << '\n';
    };
    line({"point", "t", "F(x,t)", "reduced"});
    for (const auto& c : cells) line(c);
    return os.str();
}

}  // namespace incred
