#include <gtest/gtest.h>

#include <random>

#include "cubioid/dynamics.hpp"

using namespace cubioid;

namespace {

Angle A(long n, long d) { return Angle(n, d); }

bool bounded_orbit(const CubicMap& f, cplx z, int iters = 2000) {
    return !escape_time(f, z, iters, f.escape_radius()).has_value();
}

bool connected(const CubicMap& f) { return bounded_orbit(f, f.crit1) && bounded_orbit(f, f.crit2); }

// Parameters with both critical orbits bounded, found by a seeded search.
std::vector<CubicMap> connected_samples(int count, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<CubicMap> out;
    while (static_cast<int>(out.size()) < count) {
        const cplx lambda = std::polar(0.9 * std::abs(u(rng)), 3.14159 * u(rng));
        const cplx b(0.6 * u(rng), 0.6 * u(rng));
        CubicMap f(lambda, b);
        if (connected(f)) out.push_back(f);
    }
    return out;
}

}  // namespace

TEST(CubicMap, CriticalAndCocritical) {
    for (const auto& f : connected_samples(10, 1)) {
        EXPECT_LT(std::abs(f.derivative(f.crit1)), 1e-12);
        EXPECT_LT(std::abs(f.derivative(f.crit2)), 1e-12);
        EXPECT_LT(std::abs(f(f.cocrit2()) - f(f.crit2)), 1e-12);
        EXPECT_GT(std::abs(f.cocrit2() - f.crit2), 1e-6);
    }
}

TEST(CubicMap, EscapeRadiusDoublesModulus) {
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 500; ++i) {
        CubicMap f(cplx(u(rng), u(rng)), cplx(u(rng), u(rng)));
        const double r = f.escape_radius() * (1.0 + std::abs(u(rng)));
        const cplx z = std::polar(r, u(rng));
        EXPECT_GT(std::abs(f(z)), 2.0 * std::abs(z));
    }
}

TEST(Green, PowerMapIsLogModulus) {
    CubicMap f(0.0, 0.0);
    for (cplx z : {cplx(2, 0), cplx(0, 1.5), cplx(-3, 4)}) {
        EXPECT_NEAR(*green(f, z), std::log(std::abs(z)), 1e-14);
    }
    EXPECT_FALSE(green(f, cplx(0.5, 0.5)).has_value());
}

TEST(Green, FunctionalEquation) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 200; ++i) {
        CubicMap f(cplx(u(rng), u(rng)) * 0.5, cplx(u(rng), u(rng)));
        const cplx z(u(rng), u(rng));
        auto g = green(f, z);
        if (!g) continue;
        EXPECT_NEAR(*green(f, f(z)), 3.0 * *g, 1e-11 * std::max(1.0, *g));
    }
}

TEST(Bottcher, PowerMapIsIdentity) {
    CubicMap f(0.0, 0.0);
    for (cplx z : {cplx(1.1, 0), cplx(0, -2), cplx(-5, 5)}) EXPECT_LT(std::abs(bottcher(f, z) - z), 1e-13 * std::abs(z));
    EXPECT_THROW(bottcher(f, cplx(0.3, 0)), not_escaping);
}

TEST(Bottcher, AsymptoticToIdentityPlusShift) {
    // phi(z) = z + b/3 + O(1/z).
    CubicMap f(cplx(0.2, 0.1), cplx(0.7, -0.4));
    const cplx z(3e4, 2e4);
    EXPECT_LT(std::abs(bottcher(f, z) - z - f.b / 3.0), 1e-3);
}

TEST(Bottcher, FunctionalEquationRandom) {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(-1, 1);
    int checked = 0;
    for (int i = 0; i < 400; ++i) {
        CubicMap f(cplx(u(rng), u(rng)), cplx(2 * u(rng), 2 * u(rng)));
        const cplx z(3 * u(rng), 3 * u(rng));
        if (!green(f, z)) continue;
        const cplx p = bottcher(f, z);
        const cplx p3 = p * p * p;
        EXPECT_LT(std::abs(bottcher(f, f(z)) - p3) / std::abs(p3), 1e-9);
        // |phi| = exp(G).
        EXPECT_NEAR(std::log(std::abs(p)), *green(f, z), 1e-10 * std::max(1.0, *green(f, z)));
        ++checked;
    }
    EXPECT_GT(checked, 100);
}

TEST(Bottcher, ParitySymmetry) {
    // f_{-b}(-z) = -f_b(z), hence phi_{-b}(-z) = -phi_b(z).
    CubicMap f(cplx(0.4, 0.3), cplx(0.5, 0.9)), g(cplx(0.4, 0.3), cplx(-0.5, -0.9));
    for (cplx z : {cplx(2, 1), cplx(-1.5, 0.5), cplx(0.3, 3)}) {
        EXPECT_LT(std::abs(bottcher(g, -z) + bottcher(f, z)), 1e-13);
    }
}

TEST(Designation, FasterEscapingIsOmega2) {
    CubicMap f(0.3, cplx(3.0, 0.5));
    auto d = designate_critical(f);
    ASSERT_TRUE(d.has_value());
    EXPECT_GE(*green(f, d->omega2), green(f, d->omega1).value_or(0.0));
    EXPECT_FALSE(designate_critical(CubicMap(0.3, 0.0)).has_value());
    // lambda real and b = 0: the critical points are negatives and escape equally.
    EXPECT_THROW(designate_critical(CubicMap(-5.0, 0.0)), undetermined);
}

TEST(DynamicRay, PowerMapRaysAreRadial) {
    CubicMap f(0.0, 0.0);
    for (auto th : {A(0, 1), A(1, 2), A(1, 8), A(1, 4), A(5, 26), A(1, 6)}) {
        auto ray = trace_dynamic_ray(f, th, 25, 8);
        ASSERT_TRUE(ray.landed()) << th;
        EXPECT_LT(std::abs(ray.points.back() - th.point()), 1e-9) << th;
        for (std::size_t i = 0; i < ray.points.size(); ++i) {
            EXPECT_LT(std::abs(ray.points[i] - std::exp(ray.potentials[i]) * th.point()),
                      1e-12 * std::exp(ray.potentials[i]));
        }
    }
}

TEST(DynamicRay, PotentialAndAngleOnTheRay) {
    CubicMap f(cplx(0.3, -0.2), cplx(0.4, 0.1));
    auto ray = trace_dynamic_ray(f, A(2, 7), 6, 4);
    for (std::size_t i = 0; i < ray.points.size(); ++i) {
        EXPECT_NEAR(*green(f, ray.points[i]), ray.potentials[i], 1e-11 * std::max(1.0, ray.potentials[i]));
    }
    // Far out the product formula is the analytic coordinate: compare the angle directly.
    const cplx p = bottcher(f, ray.points[2]);
    EXPECT_LT(std::abs(p / std::abs(p) - A(2, 7).point()), 1e-12);
}

TEST(DynamicRay, Equivariance) {
    // f(R_theta(t)) = R_{3 theta}(3 t).
    const int s = 8;
    for (const auto& f : connected_samples(3, 11)) {
        for (int k = 0; k < 12; ++k) {
            const Angle th = A(2 * k + 1, 24);
            auto r1 = trace_dynamic_ray(f, th, 12, s);
            auto r3 = trace_dynamic_ray(f, sigma(3, th), 12, s);
            ASSERT_FALSE(r1.crashed());
            for (std::size_t i = s; i < r1.points.size(); ++i) {
                EXPECT_NEAR(r1.potentials[i] * 3.0, r3.potentials[i - s], 1e-12 * r3.potentials[i - s]);
                // Distances are relative once |z| > 1: near r_big doubles only resolve 1e-16 |z|.
                EXPECT_LT(std::abs(f(r1.points[i]) - r3.points[i - s]), 1e-7 * std::max(1.0, std::abs(r3.points[i - s])));
            }
        }
    }
}

TEST(DynamicRay, ParityOfParameter) {
    // f_{-b}(z) = -f_b(-z): the ray theta of f_{-b} is minus the ray theta + 1/2 of f_b.
    CubicMap f(cplx(0.5, 0.2), cplx(0.3, 0.4)), g(cplx(0.5, 0.2), cplx(-0.3, -0.4));
    for (auto th : {A(1, 5), A(3, 7)}) {
        auto a = trace_dynamic_ray(g, th, 6, 4);
        auto b = trace_dynamic_ray(f, th + A(1, 2), 6, 4);
        for (std::size_t i = 0; i < a.points.size(); ++i) {
            EXPECT_LT(std::abs(a.points[i] + b.points[i]), 1e-9 * std::max(1.0, std::abs(b.points[i])));
        }
    }
}

TEST(DynamicRay, CrashIntoEscapingCriticalPoint) {
    CubicMap f(0.2, cplx(1.8, 1.1));
    auto d = designate_critical(f);
    ASSERT_TRUE(d.has_value());
    const cplx c = d->omega2;
    // Angle of the critical value, rounded to a fine rational.
    const cplx pv = bottcher(f, f(c));
    const long den = 1'000'000'000'000L;
    double a = std::arg(pv) / (2 * std::numbers::pi);
    a -= std::floor(a);
    const Angle alpha(big_rational(static_cast<long long>(std::llround(a * den)), den));
    int crashes = 0;
    for (int k = 0; k < 3; ++k) {
        const Angle th(alpha.value() / 3 + big_rational(k, 3));
        auto ray = trace_dynamic_ray(f, th, 6, 8);
        if (ray.crashed()) {
            ++crashes;
            EXPECT_LT(std::abs(std::get<Crashed>(ray.status).near - c), 1e-3);
        }
    }
    EXPECT_EQ(crashes, 2);
}

TEST(Landing, RepellingFixedPointsOfRealMap) {
    // lambda = 0.5, b = 0: fixed points 0, +-sqrt(1/2), multiplier 2 at the outer ones.
    CubicMap f(0.5, 0.0);
    auto l0 = landing_point(f, A(0, 1));
    auto lh = landing_point(f, A(1, 2));
    ASSERT_TRUE(std::holds_alternative<Landed>(l0.status));
    ASSERT_TRUE(std::holds_alternative<Landed>(lh.status));
    EXPECT_LT(std::abs(l0.point - std::sqrt(0.5)), 1e-12);
    EXPECT_LT(std::abs(lh.point + std::sqrt(0.5)), 1e-12);
    EXPECT_LT(std::abs(cycle_multiplier(f, l0.point, 1) - 2.0), 1e-10);
}

TEST(Landing, PeriodicRaysLandOnCycles) {
    for (const auto& f : connected_samples(3, 21)) {
        for (auto th : {A(1, 8), A(1, 4), A(1, 13), A(5, 26)}) {
            auto l = landing_point(f, th);
            if (!std::holds_alternative<Landed>(l.status)) continue;
            const int p = orbit_period(3, th).period;
            EXPECT_LT(l.residual, 1e-6);
            EXPECT_GE(std::abs(cycle_multiplier(f, l.point, p)), 1.0 - 1e-6);
            // The ray of 3 theta lands at the image point.
            auto l3 = landing_point(f, sigma(3, th));
            if (std::holds_alternative<Landed>(l3.status)) {
                EXPECT_LT(std::abs(f(l.point) - l3.point), 1e-6);
            }
        }
    }
}

TEST(Landing, PreperiodicRayOfPowerMap) {
    CubicMap f(0.0, 0.0);
    auto l = landing_point(f, A(1, 6));
    ASSERT_TRUE(std::holds_alternative<Landed>(l.status));
    EXPECT_LT(std::abs(l.point - A(1, 6).point()), 1e-8);
}

TEST(Guards, BadArguments) {
    CubicMap f(0.0, 0.0);
    EXPECT_THROW(trace_dynamic_ray(f, A(1, 3), 0, 4), error);
    EXPECT_THROW(trace_dynamic_ray(f, A(1, 3), 3, 0), error);
    EXPECT_THROW(refine_periodic_point(CubicMap(1.0, 0.0), 0.0, 1), ill_conditioned);
}
