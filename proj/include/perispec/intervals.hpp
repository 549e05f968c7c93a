#pragma once

#include <vector>

namespace perispec {

// Closed interval by default; set difference can open an endpoint
// (e.g. [0,1] removed from [0.9,1.2] leaves (1,1.2]).
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_closed = true;
    bool hi_closed = true;

    bool empty() const {
        return lo > hi || (lo == hi && !(lo_closed && hi_closed));
    }
    bool contains(double x) const {
        if (x < lo || x > hi) return false;
        if (x == lo && !lo_closed) return false;
        if (x == hi && !hi_closed) return false;
        return true;
    }
    double length() const { return hi > lo ? hi - lo : 0.0; }
};

// Sorted, pairwise-disjoint, non-adjacent intervals.
using IntervalUnion = std::vector<Interval>;

// Normalizes an arbitrary interval list into an IntervalUnion
// (sorts, drops empties, merges overlapping/touching members).
IntervalUnion merge_intervals(std::vector<Interval> intervals);

IntervalUnion union_of(const IntervalUnion& a, const IntervalUnion& b);

// a \ b with endpoint-open clipping.
IntervalUnion difference(const IntervalUnion& a, const IntervalUnion& b);

bool union_contains(const IntervalUnion& u, double x);

// Distance from x to the union; 0 when contained. Open endpoints are
// treated as closed for distance (a point at an open endpoint has
// distance 0 to the closure).
double union_distance(const IntervalUnion& u, double x);

// Clips the union to [0, ceiling].
IntervalUnion clip_to(const IntervalUnion& u, double ceiling);

// Complement components of u inside [0, ceiling].
std::vector<Interval> gaps_below(const IntervalUnion& u, double ceiling);

bool is_subset(const IntervalUnion& inner, const IntervalUnion& outer, double tol);

}  // namespace perispec
