#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "cubioid/quad_gaps.hpp"

using namespace cubioid;

namespace {

Angle A(long n, long d) { return Angle(n, d); }

// Orbit-containment oracle written directly from the definition of L(c).
bool in_long_arc(const Angle& theta, const Angle& x) {
    return forward_distance(theta + two_thirds(), x) <= big_rational(2, 3);
}

bool orbit_in_long_arc(const Angle& theta, Angle x) {
    // The orbit of p/d repeats within d steps.
    const long steps = static_cast<long>(x.denominator()) + 1;
    for (long i = 0; i < steps; ++i) {
        if (!in_long_arc(theta, x)) return false;
        x = sigma(3, x);
    }
    return true;
}

GapType brute_classify(const Angle& theta) {
    const Angle e1 = theta + one_third(), e2 = theta + two_thirds();
    const bool in1 = orbit_in_long_arc(theta, e1), in2 = orbit_in_long_arc(theta, e2);
    if ((is_periodic(3, e1) && in1) || (is_periodic(3, e2) && in2)) return GapType::Caterpillar;
    return in1 && in2 ? GapType::RegularCritical : GapType::Periodic;
}

}  // namespace

TEST(LongArc, Examples) {
    EXPECT_EQ(long_arc(A(0, 1)), Arc::closed(A(2, 3), A(1, 3)));
    EXPECT_EQ(long_arc(A(1, 6)), Arc::closed(A(5, 6), A(1, 2)));
    EXPECT_EQ(long_arc(A(1, 2)), Arc::closed(A(1, 6), A(5, 6)));
    EXPECT_TRUE(long_arc(A(1, 2)).contains(A(1, 2)));
}

TEST(Classify, Examples) {
    EXPECT_EQ(classify(A(0, 1)), GapType::RegularCritical);
    EXPECT_EQ(classify(A(1, 12)), GapType::Caterpillar);
    EXPECT_EQ(classify(A(1, 24)), GapType::Caterpillar);  // 1/24 + 1/3 = 3/8 has period 2
    EXPECT_EQ(classify(A(1, 5)), GapType::Periodic);
    EXPECT_EQ(classify(A(3, 4)), GapType::Periodic);
}

TEST(Classify, PeriodicEndpointLeavingLIsNotCaterpillar) {
    // 5/78 + 2/3 = 19/26 has period 3 but its orbit leaves L; 5/78 lies inside a hole.
    const Angle t = A(5, 78);
    EXPECT_TRUE(is_periodic(3, t + two_thirds()));
    EXPECT_EQ(classify(t), GapType::Periodic);
}

TEST(Classify, RandomAgainstOrbitOracle) {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<long> den(1, 250);
    for (int i = 0; i < 10000; ++i) {
        long d = den(rng);
        std::uniform_int_distribution<long> num(0, d - 1);
        Angle t(num(rng), d);
        ASSERT_EQ(classify(t), brute_classify(t)) << t;
    }
}

TEST(Classify, ConsistentWithAtlas) {
    auto atlas = enumerate_holes(7);
    for (long d = 1; d < 60; ++d) {
        for (long n = 0; n < d; ++n) {
            Angle t(n, d);
            if (t.denominator() != d) continue;
            auto type = classify(t);
            auto h = hole_containing(atlas, t);
            if (type == GapType::RegularCritical || type == GapType::Caterpillar) {
                EXPECT_FALSE(h) << t;
            }
            if (type == GapType::Caterpillar) {
                bool endpoint = std::any_of(atlas.holes.begin(), atlas.holes.end(),
                                            [&](const QHole& q) { return q.theta1 == t || q.theta2 == t; });
                EXPECT_TRUE(endpoint) << t;
            }
        }
    }
}

TEST(MajorOf, Examples) {
    auto m = major_of(A(1, 5));
    EXPECT_EQ(m.major, Chord(A(1, 2), A(0, 1)));
    EXPECT_EQ(m.period, 1);
    EXPECT_EQ(m.hole, Arc::open(A(1, 2), A(0, 1)));
    auto m2 = major_of(A(3, 4));
    EXPECT_EQ(m2.major, Chord(A(0, 1), A(1, 2)));
    EXPECT_EQ(m2.hole, Arc::open(A(0, 1), A(1, 2)));
    auto m3 = major_of(A(1, 20));
    EXPECT_EQ(m3.major, Chord(A(3, 8), A(3, 4)));
    EXPECT_EQ(m3.period, 2);
    auto rc = major_of(A(0, 1));
    EXPECT_EQ(rc.major, critical_chord(A(0, 1)));
    EXPECT_FALSE(rc.period);
}

TEST(MajorOf, BoundTooSmall) {
    // 1/20 sits in a period-2 hole; a period-1 search cannot find it.
    EXPECT_THROW(major_of(A(1, 20), 1), not_found);
}

TEST(QuadGap, PeriodicMajorProperties) {
    for (const auto& h : enumerate_holes(6).holes) {
        Angle mid(h.theta1.value() + h.length() / 2);
        QuadGap g = make_gap(mid, 6);
        ASSERT_EQ(g.type, GapType::Periodic);
        const int k = *g.major_period;
        EXPECT_EQ(orbit_period(3, g.major.a).period, k);
        EXPECT_EQ(orbit_period(3, g.major.b).period, k);
        EXPECT_GT(g.major_hole.length(), big_rational(1, 3));
        Angle a = sigma(3, g.major_hole.start), b = sigma(3, g.major_hole.end);
        for (int i = 1; i < k; ++i, a = sigma(3, a), b = sigma(3, b)) {
            EXPECT_LT(forward_distance(a, b), big_rational(1, 3));
        }
    }
}

TEST(Vertices, RegularCriticalDepthOne) {
    auto v = vertices(make_gap(A(0, 1)), 1);
    for (Angle x : {A(1, 3), A(2, 3), A(1, 9), A(7, 9), A(2, 9), A(8, 9)}) {
        EXPECT_TRUE(std::binary_search(v.begin(), v.end(), x)) << x;
    }
}

TEST(Vertices, FgbSide) {
    QuadGap g = make_gap(A(3, 4));
    auto v0 = vertices(g, 0);
    EXPECT_EQ(v0, (std::vector<Angle>{A(0, 1), A(1, 2)}));
    for (const auto& x : vertices(g, 6)) {
        EXPECT_TRUE(x == A(0, 1) || x >= A(1, 2)) << x;
    }
    // The other side of the same major.
    for (const auto& x : vertices(make_gap(A(1, 4)), 6)) EXPECT_LE(x, A(1, 2)) << x;
}

TEST(Vertices, MonotoneRefinementAndForwardInvariance) {
    for (Angle t : {A(0, 1), A(1, 5), A(1, 20), A(3, 4), A(2, 7), A(1, 12)}) {
        QuadGap g = make_gap(t);
        std::set<Angle> major_orbit;
        for (const auto& e : {g.major.a, g.major.b}) {
            for (const auto& y : forward_orbit(3, e)) major_orbit.insert(y);
        }
        std::vector<Angle> prev = vertices(g, 0);
        for (int d = 1; d <= 7; ++d) {
            auto cur = vertices(g, d);
            EXPECT_TRUE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
            EXPECT_LE(cur.size(), 2u << (d + 1));
            for (const auto& x : cur) {
                Angle y = sigma(3, x);
                EXPECT_TRUE(std::binary_search(prev.begin(), prev.end(), y) || major_orbit.count(y)) << t << " " << x;
                EXPECT_TRUE(is_vertex(g, x)) << x;
            }
            prev = std::move(cur);
        }
    }
}

TEST(Vertices, HolesMapToHolesOrCollapse) {
    for (Angle t : {A(0, 1), A(1, 5), A(1, 20), A(3, 4), A(2, 7)}) {
        QuadGap g = make_gap(t);
        const int d = 6;
        auto v = vertices(g, d);
        auto coarse = vertices(g, d - 1);
        for (std::size_t i = 0; i < v.size(); ++i) {
            const Angle& u = v[i];
            const Angle& w = v[(i + 1) % v.size()];
            Angle x = sigma(3, u), y = sigma(3, w);
            if (x == y) continue;
            Arc image = Arc::open(x, y);
            for (const auto& c : coarse) EXPECT_FALSE(image.contains(c)) << t << " hole " << u << "," << w;
        }
    }
}

TEST(CleanGap, CaterpillarBecomesPeriodic) {
    QuadGap cat = make_gap(A(1, 12));
    ASSERT_EQ(cat.type, GapType::Caterpillar);
    EXPECT_EQ(cat.major, critical_chord(A(1, 12)));
    QuadGap c = clean_gap(cat);
    EXPECT_EQ(c.type, GapType::Periodic);
    EXPECT_EQ(c.major, Chord(A(3, 8), A(3, 4)));
    EXPECT_EQ(c.major_period, 2);
    EXPECT_EQ(clean_gap(c).major, c.major);
    EXPECT_EQ(clean_gap(c).generator, c.generator);
    QuadGap rc = make_gap(A(0, 1));
    EXPECT_EQ(clean_gap(rc).major, rc.major);
}

TEST(Vassal, Examples) {
    auto fg = vassal(make_gap(A(3, 4)), 4);
    EXPECT_TRUE(std::binary_search(fg.vertices.begin(), fg.vertices.end(), A(0, 1)));
    EXPECT_TRUE(std::binary_search(fg.vertices.begin(), fg.vertices.end(), A(1, 2)));
    auto v2 = vassal(make_gap(A(1, 20)), 4);
    EXPECT_EQ(v2.period, 2);
    EXPECT_TRUE(std::binary_search(v2.vertices.begin(), v2.vertices.end(), A(3, 8)));
    EXPECT_TRUE(std::binary_search(v2.vertices.begin(), v2.vertices.end(), A(3, 4)));
    EXPECT_THROW(vassal(make_gap(A(0, 1)), 2), wrong_type);
}

TEST(Vassal, DefiningConditionAndShift) {
    for (Angle t : {A(3, 4), A(1, 20), A(1, 5), A(2, 7)}) {
        QuadGap g = make_gap(t);
        if (g.type != GapType::Periodic) continue;
        auto deep = vassal(g, 5);
        auto shallow = vassal(g, 4);
        for (const auto& x : deep.vertices) {
            EXPECT_TRUE(in_vassal(g, x)) << t << " " << x;
            Angle y = x;
            for (int i = 0; i < deep.period; ++i) y = sigma(3, y);
            EXPECT_TRUE(std::binary_search(shallow.vertices.begin(), shallow.vertices.end(), y)) << x;
        }
        // Two-to-one: the new points at depth 5 are twice the new points at depth 4.
        auto base = vassal(g, 3);
        EXPECT_EQ(deep.vertices.size() - shallow.vertices.size(), 2 * (shallow.vertices.size() - base.vertices.size()));
    }
}

TEST(Psi, FixedItineraryAndMajorCollapse) {
    QuadGap g = make_gap(A(3, 4));
    EXPECT_EQ(semiconjugacy_psi(g, A(0, 1)), A(0, 1));
    EXPECT_EQ(semiconjugacy_psi(g, A(1, 2)), A(0, 1));
    QuadGap rc = make_gap(A(0, 1));
    EXPECT_EQ(semiconjugacy_psi(rc, A(1, 3)), semiconjugacy_psi(rc, A(2, 3)));
    EXPECT_THROW(semiconjugacy_psi(rc, A(1, 2)), not_a_vertex);
}

TEST(Psi, MajorOrbitEdgesCollapse) {
    for (Angle t : {A(1, 20), A(1, 5), A(2, 7), A(0, 1), A(1, 12)}) {
        QuadGap g = make_gap(t);
        Angle a = g.major.a, b = g.major.b;
        const int k = g.major_period.value_or(1);
        for (int i = 0; i < k; ++i, a = sigma(3, a), b = sigma(3, b)) {
            EXPECT_EQ(semiconjugacy_psi(g, a), semiconjugacy_psi(g, b)) << t << " edge " << a << "," << b;
        }
    }
}

TEST(Psi, SemiconjugacyAndMonotonicity) {
    std::size_t checked = 0;
    for (Angle t : {A(0, 1), A(1, 5), A(1, 20), A(3, 4), A(2, 7), A(1, 12), A(7, 11)}) {
        QuadGap g = make_gap(t);
        auto v = vertices(g, 7);
        for (const auto& x : v) {
            EXPECT_EQ(semiconjugacy_psi(g, sigma(3, x)), sigma(2, semiconjugacy_psi(g, x))) << t << " " << x;
            ++checked;
        }
        // Weak monotonicity: starting from psi^{-1}(0), psi values never decrease.
        const Angle start = g.long_arc().contains(A(0, 1)) ? A(0, 1) : A(1, 2);
        std::sort(v.begin(), v.end(), [&](const Angle& l, const Angle& r) {
            return forward_distance(start, l) < forward_distance(start, r);
        });
        big_rational prev = -1;
        for (const auto& x : v) {
            big_rational p = psi_value(g, x);
            if (x == start) p = 0;
            EXPECT_GE(p, prev) << t << " " << x;
            prev = p;
        }
    }
    EXPECT_GE(checked, 1000u);
}
