#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace incred {

/// Closed real interval [lo, hi] with a distinguished empty state.
///
/// The empty interval carries no endpoints; asking for them throws.
/// Degeneracy is exact equality lo == hi.
class Interval {
public:
    /// The degenerate interval {0}.
    Interval() = default;
    /// Throws std::invalid_argument if lo > hi or either endpoint is NaN.
    Interval(double lo, double hi);

    static Interval point(double v) { return Interval(v, v); }
    static Interval empty() noexcept;
    /// Closed convex hull of two reals.
    static Interval hull(double a, double b);

    bool is_empty() const noexcept { return empty_; }
    bool is_degenerate() const noexcept { return !empty_ && lo_ == hi_; }

    double lo() const;
    double hi() const;
    double width() const;
    double mid() const;

    bool contains(double v) const noexcept { return !empty_ && lo_ <= v && v <= hi_; }
    bool subset_of(const Interval& other) const noexcept;

    friend bool operator==(const Interval& a, const Interval& b) noexcept;

private:
    double lo_ = 0.0;
    double hi_ = 0.0;
    bool empty_ = false;
};

Interval operator+(const Interval& a, const Interval& b);
Interval scale(double c, const Interval& a);
Interval intersect(const Interval& a, const Interval& b);
/// Smallest interval containing both (empty operands are ignored).
Interval hull(const Interval& a, const Interval& b);

std::ostream& operator<<(std::ostream& os, const Interval& a);

/// Axis-aligned product of closed intervals. The box is empty iff some axis
/// is empty; an empty box keeps its dimension.
class Box {
public:
    Box() = default;
    explicit Box(std::vector<Interval> axes);
    Box(std::initializer_list<Interval> axes);

    static Box empty(std::size_t dims);
    static Box point(std::span<const double> p);

    std::size_t dims() const noexcept { return axes_.size(); }
    bool is_empty() const noexcept;
    bool is_singleton() const noexcept;

    const Interval& operator[](std::size_t i) const { return axes_.at(i); }
    const std::vector<Interval>& axes() const noexcept { return axes_; }

    std::vector<double> lower() const;
    std::vector<double> upper() const;
    std::vector<double> center() const;

    friend bool operator==(const Box& a, const Box& b) noexcept;

private:
    std::vector<Interval> axes_;
};

/// Componentwise interval sum; empty if either operand is empty.
Box minkowski_sum(const Box& a, const Box& b);
/// Each axis becomes [min(c lo, c hi), max(c lo, c hi)].
Box scale(double c, const Box& b);
bool contains(const Box& b, std::span<const double> p);
/// Axiswise subset test; the empty box is a subset of everything.
bool subset_of(const Box& a, const Box& b);
Box intersect(const Box& a, const Box& b);
/// Smallest box containing both operands.
Box hull(const Box& a, const Box& b);

/// Indices of nondegenerate axes, i.e. the coordinate directions spanning the
/// affine hull of the box. Throws std::invalid_argument on an empty box.
std::vector<std::size_t> direction_axes(const Box& b);

/// Euclidean distance from a point to a box (+inf when the box is empty).
double distance(std::span<const double> p, const Box& b);
/// Hausdorff distance (sup norm) between two boxes. Two empty boxes are at
/// distance 0, an empty and a nonempty box at +inf.
double hausdorff(const Box& a, const Box& b);

std::ostream& operator<<(std::ostream& os, const Box& b);
std::string to_string(const Box& b);

/// Closed annulus D(inner, outer) = { y : inner <= |y|_2 <= outer }.
class Annulus {
public:
    Annulus(double inner, double outer);

    double inner() const noexcept { return inner_; }
    double outer() const noexcept { return outer_; }
    bool contains(std::span<const double> p) const noexcept;

private:
    double inner_;
    double outer_;
};

double norm2(std::span<const double> v);

}  // namespace incred
