#include "incred/setmap.hpp"

#include <cmath>
#include <random>

#include "incred/error.hpp"

namespace incred {

PiecewiseBoxMap::PiecewiseBoxMap(std::size_t state_dims, std::size_t out_dims,
                                 std::vector<Piece> pieces)
    : state_dims_(state_dims), out_dims_(out_dims), pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw SemanticError("piecewise map has no pieces");
    if (!pieces_.back().guard.is_catch_all()) {
        throw SemanticError("last piece must be guarded by 'otherwise'");
    }
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
        const auto& p = pieces_[k];
        if (p.values.size() != out_dims_) {
            throw SemanticError("piece " + std::to_string(k) + " has " +
                                std::to_string(p.values.size()) + " values, expected " +
                                std::to_string(out_dims_));
        }
        if (p.guard.max_state_index() > state_dims_) {
            throw SemanticError("piece " + std::to_string(k) + " guard references x" +
                                std::to_string(p.guard.max_state_index()));
        }
        time_dependent_ = time_dependent_ || p.guard.depends_on_time();
        for (const auto& v : p.values) {
            if (v.max_state_index() > state_dims_) {
                throw SemanticError("piece " + std::to_string(k) + " value references x" +
                                    std::to_string(v.max_state_index()));
            }
            time_dependent_ = time_dependent_ || v.depends_on_time();
        }
    }
}

std::size_t PiecewiseBoxMap::select(std::span<const double> x, double t) const {
    if (x.size() != state_dims_) {
        throw std::invalid_argument("map expects " + std::to_string(state_dims_) +
                                    " state coordinates, got " + std::to_string(x.size()));
    }
    const expr::Env env{x, t};
    for (std::size_t k = 0; k + 1 < pieces_.size(); ++k) {
        if (pieces_[k].guard.eval(env)) return k;
    }
    return pieces_.size() - 1;
}

Box PiecewiseBoxMap::eval(std::span<const double> x, double t) const {
    const auto& piece = pieces_[select(x, t)];
    const expr::Env env{x, t};
    std::vector<Interval> axes;
    axes.reserve(out_dims_);
    for (const auto& v : piece.values) axes.push_back(v.eval(env));
    return Box(std::move(axes));
}

Box eval_map(const PiecewiseBoxMap& m, std::span<const double> x, double t) { return m.eval(x, t); }

bool RegularFunctionSpec::time_dependent() const {
    return value.depends_on_time() || gradient.time_dependent();
}

Box eval_gradient(const RegularFunctionSpec& f, std::span<const double> x, double t) {
    Box g = f.gradient.eval(x, t);
    if (g.is_empty()) {
        throw SemanticError("declared gradient of " + f.name + " is empty at " +
                            to_string(Box::point(x)));
    }
    if (!f.time_dependent() && !(g[g.dims() - 1] == Interval::point(0.0))) {
        throw SemanticError("time-independent function " + f.name +
                            " declares a nonzero time component");
    }
    return g;
}

PiecewiseBoxMap make_map(std::size_t state_dims, std::size_t out_dims,
                         const std::vector<PieceSource>& pieces, const expr::Symbols& symbols) {
    expr::Symbols sym = symbols;
    sym.state_dims = state_dims;
    std::vector<Piece> parsed;
    parsed.reserve(pieces.size());
    for (const auto& src : pieces) {
        Piece p;
        p.guard = expr::parse_guard(src.guard, sym);
        for (const auto& v : src.values) p.values.push_back(expr::parse_set(v, sym));
        parsed.push_back(std::move(p));
    }
    return PiecewiseBoxMap(state_dims, out_dims, std::move(parsed));
}

RegularFunctionSpec make_function(std::string name, std::size_t state_dims, std::string_view value,
                                  const std::vector<PieceSource>& gradient, bool regular,
                                  const expr::Symbols& symbols) {
    expr::Symbols sym = symbols;
    sym.state_dims = state_dims;
    std::vector<PieceSource> pieces = gradient;
    for (auto& p : pieces) {
        if (p.values.size() == state_dims) p.values.push_back("{0}");
    }
    RegularFunctionSpec f;
    f.name = std::move(name);
    f.value = expr::parse_scalar(value, sym);
    f.gradient = make_map(state_dims, state_dims + 1, pieces, sym);
    f.regular = regular;
    return f;
}

GradientValidation validate_gradient(const RegularFunctionSpec& f, std::span<const double> x,
                                     double t, double radius, std::size_t samples,
                                     std::uint64_t seed) {
    const std::size_t n = f.state_dims();
    if (x.size() != n) throw std::invalid_argument("validate_gradient: dimension mismatch");
    if (!(radius > 0.0)) throw std::invalid_argument("validate_gradient: radius must be positive");
    if (samples == 0) throw std::invalid_argument("validate_gradient: need at least one sample");

    GradientValidation out;
    out.declared = eval_gradient(f, x, t);
    out.samples = samples;

    std::vector<Interval> inflated;
    for (const auto& a : out.declared.axes()) {
        inflated.emplace_back(a.lo() - kGradientInflation, a.hi() + kGradientInflation);
    }
    const Box target(std::move(inflated));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double step = radius / 100.0;
    const std::size_t dim = n + 1;

    std::vector<double> base(dim), probe(n), est(dim);
    std::size_t inside = 0;
    Box hull_box = Box::empty(dim);
    for (std::size_t s = 0; s < samples; ++s) {
        double norm = 0.0;
        for (auto& d : base) {
            d = normal(rng);
            norm += d * d;
        }
        norm = std::sqrt(norm);
        const double r = radius * std::pow(unit(rng), 1.0 / static_cast<double>(dim));
        for (std::size_t i = 0; i < n; ++i) base[i] = x[i] + r * base[i] / norm;
        base[n] = t + r * base[n] / norm;

        for (std::size_t i = 0; i < dim; ++i) {
            auto value_at = [&](double offset) {
                for (std::size_t k = 0; k < n; ++k) probe[k] = base[k];
                double tt = base[n];
                if (i < n) {
                    probe[i] += offset;
                } else {
                    tt += offset;
                }
                return f(probe, tt);
            };
            est[i] = (value_at(step) - value_at(-step)) / (2.0 * step);
        }
        const Box e = Box::point(est);
        if (contains(target, est)) ++inside;
        hull_box = hull(hull_box, e);
    }
    out.estimate_hull = hull_box;
    out.fraction_inside = static_cast<double>(inside) / static_cast<double>(samples);
    out.pass = out.fraction_inside >= kGradientPassFraction;
    return out;
}

}  // namespace incred
