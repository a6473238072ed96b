#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "evasim/errors.hpp"
#include "evasim/interval.hpp"

using namespace evasim;

namespace {

// Random normalized set inside [lo, hi], possibly empty.
IntervalSet random_set(Rng& rng, double lo, double hi) {
    std::vector<Interval> parts;
    const int n = static_cast<int>(rng.uniform_int(0, 4));
    for (int i = 0; i < n; ++i) {
        double a = rng.uniform_real(lo, hi);
        double b = rng.uniform_real(lo, hi);
        if (b < a) std::swap(a, b);
        parts.push_back(Interval{a, b, rng.uniform_int(0, 1) == 1, rng.uniform_int(0, 1) == 1});
    }
    return IntervalSet::from_parts(std::move(parts));
}

}  // namespace

TEST_CASE("interval basics") {
    const Interval iv{1.0, 3.0, true, false};
    CHECK(!iv.contains(1.0));
    CHECK(iv.contains(3.0));
    CHECK(iv.contains(2.0));
    CHECK(!iv.contains(3.5));
    CHECK(Interval{2.0, 2.0, false, false}.contains(2.0));
    CHECK(Interval{2.0, 2.0, true, false}.empty());
    CHECK(Interval{3.0, 2.0, false, false}.empty());
}

TEST_CASE("normalization merges and drops") {
    // overlapping parts merge
    auto s = IntervalSet::from_parts({{0, 5, false, false}, {3, 8, false, false}});
    REQUIRE(s.parts().size() == 1);
    CHECK(s.parts()[0] == Interval{0, 8, false, false});

    // touching with compatible closedness merges
    s = IntervalSet::from_parts({{0, 5, false, true}, {5, 9, false, false}});
    REQUIRE(s.parts().size() == 1);
    CHECK(s.parts()[0] == Interval{0, 9, false, false});

    // touching with both sides open keeps the hole
    s = IntervalSet::from_parts({{0, 5, false, true}, {5, 9, true, false}});
    CHECK(s.parts().size() == 2);
    CHECK(!s.contains(5.0));

    // empties vanish
    s = IntervalSet::from_parts({{2, 2, true, false}, {7, 4, false, false}});
    CHECK(s.empty());

    // canonical form: same point set built differently compares equal
    auto a = IntervalSet::from_parts({{0, 2, false, false}, {2, 4, false, false}});
    auto b = IntervalSet::from_parts({{0, 4, false, false}});
    CHECK(a == b);
}

TEST_CASE("intersection examples") {
    const Interval domain{-20, 20, false, false};

    // escape-interval arithmetic from the worked example:
    // ([min9,max9] \ [min9,7]) n [min9,13] = (7, 13]
    const IntervalSet failing(Interval{-20, 7, false, false});
    const IntervalSet accumulated(Interval{-20, 13, false, false});
    const IntervalSet escape = failing.complement_within(domain).intersect(accumulated);
    REQUIRE(escape.parts().size() == 1);
    CHECK(escape.parts()[0] == Interval{7, 13, true, false});

    // idempotence
    CHECK(accumulated.intersect(accumulated) == accumulated);

    // touching open/closed endpoints produce the empty set
    const IntervalSet left(Interval{0, 5, false, true});
    const IntervalSet right(Interval{5, 9, false, false});
    CHECK(left.intersect(right).empty());
}

TEST_CASE("complement examples") {
    const Interval domain{-20, 20, false, false};
    const IntervalSet s(Interval{-20, 7, false, false});
    const IntervalSet c = s.complement_within(domain);
    REQUIRE(c.parts().size() == 1);
    CHECK(c.parts()[0] == Interval{7, 20, true, false});

    CHECK(IntervalSet(domain).complement_within(domain).empty());
    CHECK(IntervalSet().complement_within(domain) == IntervalSet(domain));

    // complement around an interior hole keeps the single point between halves
    const auto holed = IntervalSet::from_parts({{-20, 5, false, true}, {5, 20, true, false}});
    const IntervalSet point = holed.complement_within(domain);
    REQUIRE(point.parts().size() == 1);
    CHECK(point.parts()[0] == Interval::point(5.0));
}

TEST_CASE("complement round-trips and intersect laws (property)") {
    Rng rng(20240811);
    const Interval domain{-50, 50, false, false};
    for (int trial = 0; trial < 2000; ++trial) {
        IntervalSet a = random_set(rng, -50, 50);
        IntervalSet b = random_set(rng, -50, 50);
        IntervalSet c = random_set(rng, -50, 50);

        CHECK(a.complement_within(domain).complement_within(domain) == a);
        CHECK(a.intersect(b) == b.intersect(a));
        CHECK(a.intersect(b).intersect(c) == a.intersect(b.intersect(c)));

        // monotone: result within each argument
        const IntervalSet ab = a.intersect(b);
        CHECK(ab.intersect(a) == ab);
        CHECK(ab.intersect(b) == ab);

        // membership agrees with the set algebra at random probes
        for (int probe = 0; probe < 8; ++probe) {
            const double x = rng.uniform_real(-50, 50);
            CHECK(ab.contains(x) == (a.contains(x) && b.contains(x)));
            CHECK(a.complement_within(domain).contains(x) == !a.contains(x));
        }
    }
}

TEST_CASE("sample_from membership (property)") {
    Rng rng(7);
    int draws = 0;
    while (draws < 100000) {
        IntervalSet s = random_set(rng, -30, 30);
        if (s.empty()) continue;
        for (int i = 0; i < 50 && draws < 100000; ++i, ++draws) {
            const double v = sample_from(s, FeatureKind::continuous, rng);
            REQUIRE(s.contains(v));
        }
        if (s.integer_count() > 0) {
            const double v = sample_from(s, FeatureKind::integer, rng);
            REQUIRE(s.contains(v));
            REQUIRE(v == std::floor(v));
        }
    }
}

TEST_CASE("sample_from examples and errors") {
    Rng rng(99);
    const IntervalSet open_escape(Interval{7, 13, true, false});

    for (int i = 0; i < 1000; ++i) {
        const double v = sample_from(open_escape, FeatureKind::continuous, rng);
        CHECK(v > 7.0);
        CHECK(v <= 13.0);
    }
    for (int i = 0; i < 1000; ++i) {
        const double v = sample_from(open_escape, FeatureKind::integer, rng);
        CHECK(v >= 8.0);
        CHECK(v <= 13.0);
        CHECK(v == std::floor(v));
    }

    CHECK(sample_from(IntervalSet(Interval::point(0.0)), FeatureKind::continuous, rng) == 0.0);

    CHECK_THROWS_AS(sample_from(IntervalSet(), FeatureKind::continuous, rng), EmptySetError);
    const IntervalSet no_int(Interval{4.1, 4.9, false, false});
    CHECK_THROWS_AS(sample_from(no_int, FeatureKind::integer, rng), NoIntegerError);
}

TEST_CASE("integer counting respects open endpoints") {
    const IntervalSet s = IntervalSet::from_parts({{1, 4, true, true}, {5.5, 8, false, true}});
    // (1,4) holds {2,3}; [5.5,8) holds {6,7}
    CHECK(s.integer_count() == 4);
    CHECK(s.nth_integer(0) == 2);
    CHECK(s.nth_integer(3) == 7);
}
