#include <doctest.h>

#include "perispec/intervals.hpp"

using namespace perispec;

TEST_CASE("merge combines overlapping and touching intervals") {
    IntervalUnion u = merge_intervals({{1.0, 2.0}, {1.5, 3.0}, {5.0, 6.0}});
    REQUIRE(u.size() == 2);
    CHECK(u[0].lo == 1.0);
    CHECK(u[0].hi == 3.0);
    CHECK(u[1].lo == 5.0);

    u = merge_intervals({{0.0, 1.0}, {1.0, 2.0}});
    REQUIRE(u.size() == 1);
    CHECK(u[0].hi == 2.0);
}

TEST_CASE("union basic algebra") {
    IntervalUnion a = merge_intervals({{0.0, 1.0}, {2.0, 3.0}});
    IntervalUnion b = merge_intervals({{1.4, 1.6}});
    IntervalUnion all = union_of(a, b);
    REQUIRE(all.size() == 3);
    CHECK(all[1].lo == doctest::Approx(1.4));
    CHECK(all[1].hi == doctest::Approx(1.6));
}

TEST_CASE("difference clips with open endpoints") {
    IntervalUnion sharp = merge_intervals({{0.9, 1.2}});
    IntervalUnion bands = merge_intervals({{0.0, 1.0}});
    IntervalUnion ad = difference(sharp, bands);
    REQUIRE(ad.size() == 1);
    CHECK(ad[0].lo == 1.0);
    CHECK_FALSE(ad[0].lo_closed);
    CHECK(ad[0].hi == 1.2);
    CHECK(ad[0].hi_closed);
    CHECK_FALSE(ad[0].contains(1.0));
    CHECK(ad[0].contains(1.2));
}

TEST_CASE("difference of covered set is empty") {
    IntervalUnion inner = merge_intervals({{1.4, 1.6}});
    IntervalUnion outer = merge_intervals({{1.0, 2.0}});
    CHECK(difference(inner, outer).empty());
    CHECK(is_subset(inner, outer, 0.0));
}

TEST_CASE("distance and containment") {
    IntervalUnion u = merge_intervals({{1.0, 2.0}, {4.0, 5.0}});
    CHECK(union_contains(u, 1.5));
    CHECK_FALSE(union_contains(u, 3.0));
    CHECK(union_distance(u, 3.0) == doctest::Approx(1.0));
    CHECK(union_distance(u, 0.5) == doctest::Approx(0.5));
    CHECK(union_distance(u, 4.5) == 0.0);
}

TEST_CASE("gaps below a ceiling") {
    IntervalUnion u = merge_intervals({{0.0, 1.0}, {2.0, 3.0}});
    auto gaps = gaps_below(u, 2.5);
    REQUIRE(gaps.size() == 1);
    CHECK(gaps[0].lo == 1.0);
    CHECK(gaps[0].hi == 2.0);

    gaps = gaps_below(u, 4.0);
    REQUIRE(gaps.size() == 2);
    CHECK(gaps[1].lo == 3.0);
    CHECK(gaps[1].hi == 4.0);

    // union starting above zero exposes a leading gap
    gaps = gaps_below(merge_intervals({{1.0, 2.0}}), 1.5);
    REQUIRE(gaps.size() == 1);
    CHECK(gaps[0].lo == 0.0);
}

TEST_CASE("clip to trust ceiling") {
    IntervalUnion u = merge_intervals({{0.0, 1.0}, {2.0, 3.0}});
    auto c = clip_to(u, 2.5);
    REQUIRE(c.size() == 2);
    CHECK(c[1].hi == 2.5);
}
