#include "incred/interval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "incred/format.hpp"

namespace incred {

namespace {

void require_same_dims(std::size_t a, std::size_t b, const char* op) {
    if (a != b) {
        throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                    std::to_string(a) + " vs " + std::to_string(b) + ")");
    }
}

}  // namespace

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (std::isnan(lo) || std::isnan(hi)) {
        throw std::invalid_argument("Interval: NaN endpoint");
    }
    if (lo > hi) {
        throw std::invalid_argument("Interval: lo > hi (" + format_real(lo) + " > " +
                                    format_real(hi) + ")");
    }
}

Interval Interval::empty() noexcept {
    Interval r;
    r.empty_ = true;
    return r;
}

Interval Interval::hull(double a, double b) { return Interval(std::min(a, b), std::max(a, b)); }

double Interval::lo() const {
    if (empty_) throw std::logic_error("Interval::lo on empty interval");
    return lo_;
}

double Interval::hi() const {
    if (empty_) throw std::logic_error("Interval::hi on empty interval");
    return hi_;
}

double Interval::width() const { return hi() - lo(); }

double Interval::mid() const {
    if (empty_) throw std::logic_error("Interval::mid on empty interval");
    if (lo_ == hi_) return lo_;
    return lo_ + 0.5 * (hi_ - lo_);
}

bool Interval::subset_of(const Interval& other) const noexcept {
    if (empty_) return true;
    if (other.empty_) return false;
    return other.lo_ <= lo_ && hi_ <= other.hi_;
}

bool operator==(const Interval& a, const Interval& b) noexcept {
    if (a.empty_ || b.empty_) return a.empty_ == b.empty_;
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
}

Interval operator+(const Interval& a, const Interval& b) {
    if (a.is_empty() || b.is_empty()) return Interval::empty();
    return Interval(a.lo() + b.lo(), a.hi() + b.hi());
}

Interval scale(double c, const Interval& a) {
    if (a.is_empty()) return Interval::empty();
    if (c == 0.0) return Interval::point(0.0);
    const double u = c * a.lo();
    const double v = c * a.hi();
    return Interval(std::min(u, v), std::max(u, v));
}

Interval intersect(const Interval& a, const Interval& b) {
    if (a.is_empty() || b.is_empty()) return Interval::empty();
    const double lo = std::max(a.lo(), b.lo());
    const double hi = std::min(a.hi(), b.hi());
    if (lo > hi) return Interval::empty();
    return Interval(lo, hi);
}

Interval hull(const Interval& a, const Interval& b) {
    if (a.is_empty()) return b;
    if (b.is_empty()) return a;
    return Interval(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

std::ostream& operator<<(std::ostream& os, const Interval& a) {
    if (a.is_empty()) return os << "empty";
    if (a.is_degenerate()) return os << '{' << format_real(a.lo()) << '}';
    return os << '[' << format_real(a.lo()) << ", " << format_real(a.hi()) << ']';
}

Box::Box(std::vector<Interval> axes) : axes_(std::move(axes)) {}

Box::Box(std::initializer_list<Interval> axes) : axes_(axes) {}

Box Box::empty(std::size_t dims) {
    return Box(std::vector<Interval>(dims, Interval::empty()));
}

Box Box::point(std::span<const double> p) {
    std::vector<Interval> axes;
    axes.reserve(p.size());
    for (double v : p) axes.push_back(Interval::point(v));
    return Box(std::move(axes));
}

bool Box::is_empty() const noexcept {
    return std::any_of(axes_.begin(), axes_.end(), [](const Interval& a) { return a.is_empty(); });
}

bool Box::is_singleton() const noexcept {
    return std::all_of(axes_.begin(), axes_.end(),
                       [](const Interval& a) { return a.is_degenerate(); });
}

std::vector<double> Box::lower() const {
    std::vector<double> r;
    for (const auto& a : axes_) r.push_back(a.lo());
    return r;
}

std::vector<double> Box::upper() const {
    std::vector<double> r;
    for (const auto& a : axes_) r.push_back(a.hi());
    return r;
}

std::vector<double> Box::center() const {
    std::vector<double> r;
    for (const auto& a : axes_) r.push_back(a.mid());
    return r;
}

bool operator==(const Box& a, const Box& b) noexcept {
    if (a.dims() != b.dims()) return false;
    if (a.is_empty() || b.is_empty()) return a.is_empty() == b.is_empty();
    return a.axes_ == b.axes_;
}

Box minkowski_sum(const Box& a, const Box& b) {
    require_same_dims(a.dims(), b.dims(), "minkowski_sum");
    if (a.is_empty() || b.is_empty()) return Box::empty(a.dims());
    std::vector<Interval> axes;
    axes.reserve(a.dims());
    for (std::size_t i = 0; i < a.dims(); ++i) axes.push_back(a[i] + b[i]);
    return Box(std::move(axes));
}

Box scale(double c, const Box& b) {
    if (b.is_empty()) return Box::empty(b.dims());
    std::vector<Interval> axes;
    axes.reserve(b.dims());
    for (const auto& a : b.axes()) axes.push_back(scale(c, a));
    return Box(std::move(axes));
}

bool contains(const Box& b, std::span<const double> p) {
    require_same_dims(b.dims(), p.size(), "contains");
    if (b.is_empty()) return false;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!b[i].contains(p[i])) return false;
    }
    return true;
}

bool subset_of(const Box& a, const Box& b) {
    require_same_dims(a.dims(), b.dims(), "subset_of");
    if (a.is_empty()) return true;
    if (b.is_empty()) return false;
    for (std::size_t i = 0; i < a.dims(); ++i) {
        if (!a[i].subset_of(b[i])) return false;
    }
    return true;
}

Box intersect(const Box& a, const Box& b) {
    require_same_dims(a.dims(), b.dims(), "intersect");
    std::vector<Interval> axes;
    axes.reserve(a.dims());
    for (std::size_t i = 0; i < a.dims(); ++i) {
        Interval r = intersect(a[i], b[i]);
        if (r.is_empty()) return Box::empty(a.dims());
        axes.push_back(r);
    }
    return Box(std::move(axes));
}

Box hull(const Box& a, const Box& b) {
    require_same_dims(a.dims(), b.dims(), "hull");
    if (a.is_empty()) return b;
    if (b.is_empty()) return a;
    std::vector<Interval> axes;
    for (std::size_t i = 0; i < a.dims(); ++i) axes.push_back(hull(a[i], b[i]));
    return Box(std::move(axes));
}

std::vector<std::size_t> direction_axes(const Box& b) {
    if (b.is_empty()) throw std::invalid_argument("direction_axes: empty box");
    std::vector<std::size_t> r;
    for (std::size_t i = 0; i < b.dims(); ++i) {
        if (!b[i].is_degenerate()) r.push_back(i);
    }
    return r;
}

double distance(std::span<const double> p, const Box& b) {
    require_same_dims(b.dims(), p.size(), "distance");
    if (b.is_empty()) return std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double d = 0.0;
        if (p[i] < b[i].lo()) d = b[i].lo() - p[i];
        else if (p[i] > b[i].hi()) d = p[i] - b[i].hi();
        acc += d * d;
    }
    return std::sqrt(acc);
}

double hausdorff(const Box& a, const Box& b) {
    require_same_dims(a.dims(), b.dims(), "hausdorff");
    if (a.is_empty() && b.is_empty()) return 0.0;
    if (a.is_empty() || b.is_empty()) return std::numeric_limits<double>::infinity();
    double r = 0.0;
    for (std::size_t i = 0; i < a.dims(); ++i) {
        r = std::max({r, std::abs(a[i].lo() - b[i].lo()), std::abs(a[i].hi() - b[i].hi())});
    }
    return r;
}

std::ostream& operator<<(std::ostream& os, const Box& b) {
    if (b.is_empty()) return os << "empty";
    for (std::size_t i = 0; i < b.dims(); ++i) {
        if (i) os << " x ";
        os << b[i];
    }
    return os;
}

std::string to_string(const Box& b) {
    std::ostringstream os;
    os << b;
    return os.str();
}

Annulus::Annulus(double inner, double outer) : inner_(inner), outer_(outer) {
    if (!(inner >= 0.0) || !(outer > inner)) {
        throw std::invalid_argument("Annulus: require 0 <= inner < outer");
    }
}

bool Annulus::contains(std::span<const double> p) const noexcept {
    const double r = norm2(p);
    return inner_ <= r && r <= outer_;
}

double norm2(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

}  // namespace incred
