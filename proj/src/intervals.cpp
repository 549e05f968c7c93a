#include "perispec/intervals.hpp"

#include <algorithm>
#include <cmath>

namespace perispec {

namespace {

// True when a and b overlap or touch so they merge into one interval.
// Touching at a point merges iff at least one side includes the point.
bool mergeable(const Interval& a, const Interval& b) {
    // assumes a.lo <= b.lo
    if (b.lo < a.hi) return true;
    if (b.lo == a.hi) return a.hi_closed || b.lo_closed;
    return false;
}

}  // namespace

IntervalUnion merge_intervals(std::vector<Interval> intervals) {
    IntervalUnion out;
    intervals.erase(std::remove_if(intervals.begin(), intervals.end(),
                                   [](const Interval& iv) { return iv.empty(); }),
                    intervals.end());
    std::sort(intervals.begin(), intervals.end(), [](const Interval& a, const Interval& b) {
        if (a.lo != b.lo) return a.lo < b.lo;
        return a.lo_closed && !b.lo_closed;
    });
    for (const Interval& iv : intervals) {
        if (!out.empty() && mergeable(out.back(), iv)) {
            Interval& last = out.back();
            if (iv.hi > last.hi) {
                last.hi = iv.hi;
                last.hi_closed = iv.hi_closed;
            } else if (iv.hi == last.hi) {
                last.hi_closed = last.hi_closed || iv.hi_closed;
            }
        } else {
            out.push_back(iv);
        }
    }
    return out;
}

IntervalUnion union_of(const IntervalUnion& a, const IntervalUnion& b) {
    std::vector<Interval> all(a);
    all.insert(all.end(), b.begin(), b.end());
    return merge_intervals(std::move(all));
}

IntervalUnion difference(const IntervalUnion& a, const IntervalUnion& b) {
    IntervalUnion out;
    for (Interval cur : a) {
        std::vector<Interval> pieces{cur};
        for (const Interval& cut : b) {
            std::vector<Interval> next;
            for (const Interval& p : pieces) {
                if (cut.hi < p.lo || cut.lo > p.hi) {
                    next.push_back(p);
                    continue;
                }
                // left remainder: [p.lo, cut.lo) or [p.lo, cut.lo]
                if (cut.lo > p.lo || (cut.lo == p.lo && !cut.lo_closed && p.lo_closed)) {
                    Interval left = p;
                    left.hi = cut.lo;
                    left.hi_closed = !cut.lo_closed;
                    if (!left.empty()) next.push_back(left);
                }
                // right remainder
                if (cut.hi < p.hi || (cut.hi == p.hi && !cut.hi_closed && p.hi_closed)) {
                    Interval right = p;
                    right.lo = cut.hi;
                    right.lo_closed = !cut.hi_closed;
                    if (!right.empty()) next.push_back(right);
                }
            }
            pieces = std::move(next);
        }
        out.insert(out.end(), pieces.begin(), pieces.end());
    }
    return merge_intervals(std::move(out));
}

bool union_contains(const IntervalUnion& u, double x) {
    for (const Interval& iv : u)
        if (iv.contains(x)) return true;
    return false;
}

double union_distance(const IntervalUnion& u, double x) {
    double best = std::numeric_limits<double>::infinity();
    for (const Interval& iv : u) {
        double d = 0.0;
        if (x < iv.lo)
            d = iv.lo - x;
        else if (x > iv.hi)
            d = x - iv.hi;
        best = std::min(best, d);
    }
    return best;
}

IntervalUnion clip_to(const IntervalUnion& u, double ceiling) {
    IntervalUnion out;
    for (Interval iv : u) {
        if (iv.lo > ceiling) continue;
        if (iv.hi > ceiling) {
            iv.hi = ceiling;
            iv.hi_closed = true;
        }
        if (!iv.empty()) out.push_back(iv);
    }
    return out;
}

std::vector<Interval> gaps_below(const IntervalUnion& u, double ceiling) {
    std::vector<Interval> gaps;
    double cursor = 0.0;
    for (const Interval& iv : u) {
        if (iv.lo > ceiling) break;
        if (iv.lo > cursor) gaps.push_back({cursor, std::min(iv.lo, ceiling)});
        cursor = std::max(cursor, iv.hi);
        if (cursor >= ceiling) return gaps;
    }
    if (cursor < ceiling) gaps.push_back({cursor, ceiling});
    return gaps;
}

bool is_subset(const IntervalUnion& inner, const IntervalUnion& outer, double tol) {
    // Every point of inner must lie within tol of outer. The uncovered
    // pieces are bounded sets; the distance maximum over each piece is
    // attained at an endpoint or at the midpoint of the hosting gap, so
    // dense sampling of each piece is reliable here.
    IntervalUnion uncovered = difference(inner, outer);
    for (const Interval& piece : uncovered) {
        const int samples = 33;
        for (int i = 0; i <= samples; ++i) {
            double x = piece.lo + (piece.hi - piece.lo) * i / samples;
            if (union_distance(outer, x) > tol) return false;
        }
    }
    return true;
}

}  // namespace perispec
