#include "incred/grid.hpp"

#include <algorithm>
#include <stdexcept>

namespace incred {

std::vector<double> linspace(double lo, double hi, std::size_t count) {
    std::vector<double> r;
    if (count == 0) return r;
    if (count == 1) return {lo};
    r.reserve(count);
    const double span = hi - lo;
    const double denom = static_cast<double>(count - 1);
    for (std::size_t k = 0; k < count; ++k) {
        if (k == count - 1) {
            r.push_back(hi);
        } else {
            r.push_back(lo + span * static_cast<double>(k) / denom);
        }
    }
    return r;
}

std::vector<std::vector<double>> GridSpec::axis_nodes(const Box& domain) const {
    const std::size_t n = domain.dims();
    if (domain.is_empty()) throw std::invalid_argument("GridSpec: empty domain");
    auto per_axis_ok = [n](std::size_t size, const char* what) {
        if (size != 0 && size != n) {
            throw std::invalid_argument(std::string("GridSpec: ") + what + " has " +
                                        std::to_string(size) + " axes, domain has " +
                                        std::to_string(n));
        }
    };
    per_axis_ok(counts.size(), "counts");
    per_axis_ok(nodes.size(), "nodes");
    per_axis_ok(include.size(), "include");

    std::vector<std::vector<double>> axes(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = domain[i].lo();
        const double hi = domain[i].hi();
        auto& a = axes[i];
        if (!counts.empty()) {
            auto u = linspace(lo, hi, counts[i]);
            a.insert(a.end(), u.begin(), u.end());
        }
        if (!nodes.empty()) a.insert(a.end(), nodes[i].begin(), nodes[i].end());
        if (!include.empty()) a.insert(a.end(), include[i].begin(), include[i].end());
        std::erase_if(a, [lo, hi](double v) { return v < lo || v > hi; });
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
        if (a.empty()) {
            throw std::invalid_argument("GridSpec: axis " + std::to_string(i + 1) +
                                        " has no nodes inside the domain");
        }
    }
    return axes;
}

std::vector<std::vector<double>> GridSpec::state_nodes(const Box& domain) const {
    return cartesian_product(axis_nodes(domain));
}

GridSpec GridSpec::refined(std::size_t factor) const {
    GridSpec r = *this;
    for (auto& c : r.counts) {
        if (c >= 2) c = (c - 1) * factor + 1;
    }
    return r;
}

std::vector<std::vector<double>> cartesian_product(const std::vector<std::vector<double>>& axes) {
    std::vector<std::vector<double>> out;
    if (axes.empty()) return out;
    std::size_t total = 1;
    for (const auto& a : axes) total *= a.size();
    if (total == 0) return out;
    out.reserve(total);
    std::vector<std::size_t> idx(axes.size(), 0);
    for (std::size_t k = 0; k < total; ++k) {
        std::vector<double> p(axes.size());
        for (std::size_t i = 0; i < axes.size(); ++i) p[i] = axes[i][idx[i]];
        out.push_back(std::move(p));
        for (std::size_t i = axes.size(); i-- > 0;) {
            if (++idx[i] < axes[i].size()) break;
            idx[i] = 0;
        }
    }
    return out;
}

}  // namespace incred
