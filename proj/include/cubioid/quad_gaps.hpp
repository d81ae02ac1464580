#pragma once

// Quadratic invariant gaps U(c_theta) of sigma_3: classification, majors,
// vertex samples, vassal gaps and the semiconjugacy to sigma_2.

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cubioid/angle.hpp"
#include "cubioid/q_atlas.hpp"

namespace cubioid {

enum class GapType { RegularCritical, Caterpillar, Periodic };

inline std::string to_string(GapType t) {
    switch (t) {
        case GapType::RegularCritical: return "regular-critical";
        case GapType::Caterpillar: return "caterpillar";
        case GapType::Periodic: return "periodic";
    }
    return "?";
}

inline constexpr int default_search_period = 10;

/// The closed arc [theta + 2/3, theta + 1/3] of length 2/3 through theta.
inline Arc long_arc(const Angle& theta) { return Arc::closed(theta + two_thirds(), theta + one_third()); }

/// True iff the whole forward orbit of x stays in `arc`.
inline bool orbit_stays_in(const Arc& arc, const Angle& x) {
    for (const auto& y : forward_orbit(3, x)) {
        if (!arc.contains(y)) return false;
    }
    return true;
}

namespace detail {

// An endpoint of c_theta counts as the periodic anchor of a caterpillar only
// when its orbit never leaves L(c_theta).
inline std::optional<Angle> caterpillar_anchor(const Angle& theta) {
    const Arc L = long_arc(theta);
    for (const Angle& e : {theta + one_third(), theta + two_thirds()}) {
        if (is_periodic(3, e) && orbit_stays_in(L, e)) return e;
    }
    return std::nullopt;
}

}  // namespace detail

inline GapType classify(const Angle& theta) {
    if (detail::caterpillar_anchor(theta)) return GapType::Caterpillar;
    const Arc L = long_arc(theta);
    if (orbit_stays_in(L, theta + one_third()) && orbit_stays_in(L, theta + two_thirds())) {
        return GapType::RegularCritical;
    }
    return GapType::Periodic;
}

struct MajorInfo {
    Chord major;
    Arc hole;  // open major hole, traversed positively
    std::optional<int> period;
};

/// The major of the clean gap U_c(c_theta), searching Q-holes of period <= max_period.
inline MajorInfo major_of(const Angle& theta, int max_period = default_search_period) {
    const GapType type = classify(theta);
    if (type == GapType::RegularCritical) {
        return {critical_chord(theta), Arc::open(theta + one_third(), theta + two_thirds()), std::nullopt};
    }
    const int top = std::min(max_period, max_atlas_period);
    if (type == GapType::Caterpillar) {
        const int q = orbit_period(3, *detail::caterpillar_anchor(theta)).period;
        if (q <= top) {
            for (const auto& h : cached_holes_of_period(q)) {
                if (h.theta1 == theta || h.theta2 == theta) return {h.major(), h.major_hole(), q};
            }
        }
        throw not_found("no hole of period <= " + std::to_string(max_period) + " ends at " + theta.str());
    }
    for (int q = 1; q <= top; ++q) {
        for (const auto& h : cached_holes_of_period(q)) {
            if (h.contains(theta)) return {h.major(), h.major_hole(), q};
        }
    }
    throw not_found("no hole of period <= " + std::to_string(max_period) + " contains " + theta.str());
}

struct QuadGap {
    Angle generator;
    GapType type = GapType::RegularCritical;
    Chord major;
    Arc major_hole;
    std::optional<int> major_period;

    [[nodiscard]] Arc long_arc() const { return cubioid::long_arc(generator); }
};

/// U(c_theta). Caterpillar gaps keep the critical chord as major; use clean_gap for U_c.
inline QuadGap make_gap(const Angle& theta, int max_period = default_search_period) {
    QuadGap g;
    g.generator = theta;
    g.type = classify(theta);
    if (g.type == GapType::Caterpillar) {
        g.major = critical_chord(theta);
        g.major_hole = Arc::open(theta + one_third(), theta + two_thirds());
        g.major_period = orbit_period(3, *detail::caterpillar_anchor(theta)).period;
        return g;
    }
    auto m = major_of(theta, max_period);
    g.major = m.major;
    g.major_hole = m.hole;
    g.major_period = m.period;
    return g;
}

/// U_c: for a caterpillar, the periodic gap of the hole it bounds (generated by the hole midpoint).
inline QuadGap clean_gap(const QuadGap& gap, int max_period = default_search_period) {
    if (gap.type != GapType::Caterpillar) return gap;
    auto m = major_of(gap.generator, max_period);
    const Angle theta1 = m.hole.start - one_third();
    const Angle mid(theta1.value() + (m.hole.length() - big_rational(1, 3)) / 2);
    QuadGap g = make_gap(mid, max_period);
    if (g.type != GapType::Periodic || g.major != m.major) {
        throw error("clean_gap: hole midpoint " + mid.str() + " does not generate the expected periodic gap");
    }
    return g;
}

/// Vertices of the gap reached by pulling back the major endpoints `depth` times into L.
/// Depth d contains depth d - 1.
inline std::vector<Angle> vertices(const QuadGap& gap, int depth) {
    if (depth < 0) throw error("vertices: negative depth");
    const Arc L = gap.long_arc();
    std::set<Angle> all{gap.major.a, gap.major.b};
    std::vector<Angle> frontier(all.begin(), all.end());
    for (int d = 0; d < depth; ++d) {
        std::vector<Angle> next;
        for (const auto& v : frontier) {
            for (auto& x : preimages_in(L, v)) {
                if (all.insert(x).second) next.push_back(std::move(x));
            }
        }
        frontier = std::move(next);
    }
    return {all.begin(), all.end()};
}

inline bool is_vertex(const QuadGap& gap, const Angle& alpha) {
    if (gap.major_hole.contains(alpha)) return false;
    return orbit_stays_in(gap.long_arc(), alpha);
}

struct VassalGap {
    QuadGap senior;
    int period = 0;
    int depth = 0;
    std::vector<Angle> vertices;  // sorted
};

namespace detail {

// Closed arcs [3^i a, 3^i b], i = 0..k-1, swept by the major hole of a periodic gap.
inline std::vector<Arc> major_hole_orbit(const QuadGap& gap) {
    const int k = *gap.major_period;
    std::vector<Arc> arcs;
    Angle a = gap.major_hole.start, b = gap.major_hole.end;
    for (int i = 0; i < k; ++i) {
        arcs.push_back(Arc::closed(a, b));
        a = sigma(3, a);
        b = sigma(3, b);
    }
    return arcs;
}

}  // namespace detail

/// Sample of the vassal gap: angles whose n-th image stays in [3^n a, 3^n b] for all n,
/// obtained by pulling the major endpoints back `depth` times under sigma_3^k.
inline VassalGap vassal(const QuadGap& gap, int depth) {
    if (gap.type != GapType::Periodic) throw wrong_type("vassal gaps exist only for periodic gaps");
    if (depth < 0) throw error("vassal: negative depth");
    const auto arcs = detail::major_hole_orbit(gap);
    const int k = static_cast<int>(arcs.size());
    auto pull_back = [&](const Angle& y) {
        Angle z = y;
        for (int i = k - 1; i >= 1; --i) {
            auto pre = preimages_in(arcs[i], z);
            if (pre.size() != 1) throw error("vassal: pullback through a short hole is not unique");
            z = pre.front();
        }
        return preimages_in(arcs[0], z);
    };
    std::set<Angle> all{gap.major.a, gap.major.b};
    std::vector<Angle> frontier(all.begin(), all.end());
    for (int d = 0; d < depth; ++d) {
        std::vector<Angle> next;
        for (const auto& v : frontier) {
            for (auto& x : pull_back(v)) {
                if (all.insert(x).second) next.push_back(std::move(x));
            }
        }
        frontier = std::move(next);
    }
    return {gap, k, depth, {all.begin(), all.end()}};
}

/// True iff sigma_3^n(alpha) lies in [3^n a, 3^n b] for every n >= 0.
inline bool in_vassal(const QuadGap& gap, const Angle& alpha) {
    if (gap.type != GapType::Periodic) throw wrong_type("vassal gaps exist only for periodic gaps");
    const auto arcs = detail::major_hole_orbit(gap);
    const std::size_t k = arcs.size();
    std::set<std::pair<Angle, std::size_t>> seen;
    Angle x = alpha;
    for (std::size_t n = 0; seen.emplace(x, n % k).second; ++n) {
        if (!arcs[n % k].contains(x)) return false;
        x = sigma(3, x);
    }
    return true;
}

namespace detail {

struct PsiCut {
    Angle fixed;  // psi^{-1}(0)
    Angle cut;    // the other vertex preimage of `fixed`, psi^{-1}(1/2)
};

inline PsiCut psi_cut(const QuadGap& gap) {
    const Arc L = gap.long_arc();
    const Angle zero(0, 1), half(1, 2);
    const Angle fixed = L.contains(zero) ? zero : half;
    const Arc interior = Arc::open(L.start, L.end);
    std::optional<Angle> cut;
    for (const Angle& c : {fixed + one_third(), fixed + two_thirds()}) {
        if (!L.contains(c)) continue;
        if (!cut || interior.contains(c)) cut = c;
    }
    return {fixed, *cut};
}

}  // namespace detail

/// psi(alpha) as a real number in [0, 1]; 1 and 0 denote the same circle point.
inline big_rational psi_value(const QuadGap& gap, const Angle& alpha) {
    if (!is_vertex(gap, alpha)) throw not_a_vertex(alpha.str());
    const auto [fixed, cut] = detail::psi_cut(gap);
    auto digit = [&](const Angle& x) {
        if (x == fixed) return 0;
        if (x == cut) return 1;
        return forward_distance(fixed, x) < forward_distance(fixed, cut) ? 0 : 1;
    };
    const auto orbit = forward_orbit(3, alpha);
    const auto shape = orbit_period(3, alpha);
    big_rational pre = 0, weight = 1;
    for (int i = 0; i < shape.preperiod; ++i) {
        weight /= 2;
        pre += weight * digit(orbit[i]);
    }
    big_rational cyc = 0, w = 1;
    for (int i = 0; i < shape.period; ++i) {
        w /= 2;
        cyc += w * digit(orbit[shape.preperiod + i]);
    }
    // Repeating block: cyc / (1 - 2^-period), shifted by the preperiod.
    return pre + weight * cyc / (1 - w);
}

/// The semiconjugacy psi with psi(sigma_3 alpha) = sigma_2(psi alpha); collapses every hole of the gap.
inline Angle semiconjugacy_psi(const QuadGap& gap, const Angle& alpha) { return Angle(psi_value(gap, alpha)); }

}  // namespace cubioid
