#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace octspec {

/// Closed real interval [lo, hi]. An interval with hi < lo is empty.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi > lo ? hi - lo : 0.0; }
    double center() const { return 0.5 * (lo + hi); }
    bool empty() const { return hi < lo; }
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool intersects(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }

    Interval scaled(double factor) const {
        return factor >= 0 ? Interval{lo * factor, hi * factor} : Interval{hi * factor, lo * factor};
    }
    Interval shifted(double offset) const { return {lo + offset, hi + offset}; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Distance between two intervals; zero if they intersect.
inline double distance(const Interval& a, const Interval& b) {
    if (a.intersects(b)) return 0.0;
    return a.hi < b.lo ? b.lo - a.hi : a.lo - b.hi;
}

inline double distance(double x, const Interval& b) { return distance(Interval{x, x}, b); }

/// Sorts and merges overlapping (or touching) intervals.
inline std::vector<Interval> merge_intervals(std::vector<Interval> xs) {
    std::erase_if(xs, [](const Interval& i) { return i.empty(); });
    std::sort(xs.begin(), xs.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> out;
    for (const auto& i : xs) {
        if (!out.empty() && i.lo <= out.back().hi) {
            out.back().hi = std::max(out.back().hi, i.hi);
        } else {
            out.push_back(i);
        }
    }
    return out;
}

/// A + B = {x + y : x in A, y in B} for finite unions of intervals.
inline std::vector<Interval> minkowski_sum(std::span<const Interval> a, std::span<const Interval> b) {
    std::vector<Interval> sums;
    sums.reserve(a.size() * b.size());
    for (const auto& x : a)
        for (const auto& y : b) sums.push_back({x.lo + y.lo, x.hi + y.hi});
    return merge_intervals(std::move(sums));
}

/// Smallest distance from an interval to a union of intervals (infinity if the union is empty).
inline double distance(const Interval& a, std::span<const Interval> set) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& s : set) d = std::min(d, distance(a, s));
    return d;
}

/// Hull of a non-empty union.
inline Interval hull(std::span<const Interval> set) {
    Interval h{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& s : set) {
        h.lo = std::min(h.lo, s.lo);
        h.hi = std::max(h.hi, s.hi);
    }
    return h;
}

}  // namespace octspec
