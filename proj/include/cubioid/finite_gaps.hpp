#pragma once

// Finite sigma_3-invariant gaps with a rotation number: types A, B, D.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cubioid/angle.hpp"
#include "cubioid/q_atlas.hpp"

namespace cubioid {

inline constexpr int max_finite_gap_period = 9;

struct Rotation {
    int p = 0;
    int q = 1;
    friend bool operator==(const Rotation&, const Rotation&) = default;
    [[nodiscard]] std::string str() const { return std::to_string(p) + "/" + std::to_string(q); }
};

/// Rotation number of a finite sigma_3-invariant set on which sigma_3 acts by a
/// circular shift; none when the order is not preserved.
inline std::optional<Rotation> rotation_number(const std::vector<Angle>& points) {
    std::set<Angle> s(points.begin(), points.end());
    if (s.empty()) throw not_an_orbit("empty set");
    std::set<Angle> image;
    for (const auto& x : s) image.insert(sigma(3, x));
    if (image != s) throw not_an_orbit("set is not mapped onto itself by sigma_3");
    const std::vector<Angle> sorted(s.begin(), s.end());
    const int n = static_cast<int>(sorted.size());
    auto index_of = [&](const Angle& x) {
        return static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
    };
    const int shift = index_of(sigma(3, sorted[0]));
    for (int i = 1; i < n; ++i) {
        if (index_of(sigma(3, sorted[i])) != (i + shift) % n) return std::nullopt;
    }
    const int g = std::gcd(shift, n);
    return Rotation{shift / g, n / g};
}

enum class FiniteGapType { A, B, D };

inline std::string to_string(FiniteGapType t) {
    switch (t) {
        case FiniteGapType::A: return "A";
        case FiniteGapType::B: return "B";
        case FiniteGapType::D: return "D";
    }
    return "?";
}

struct FiniteGap {
    std::vector<Angle> vertices;  // sorted
    FiniteGapType type = FiniteGapType::A;
    Rotation rotation;
    std::vector<Chord> majors;
    std::vector<Arc> major_holes;  // open; the hole containing 0 first, then the one containing 1/2
    bool degenerate_leaf = false;  // the leaf 0-1/2 standing in for rotation 0/1

    friend bool operator==(const FiniteGap& l, const FiniteGap& r) { return l.vertices == r.vertices; }
};

namespace detail {

// Angles k / (3^q - 1) as integers k; sigma_3 is k -> 3k mod n.
struct IntCircle {
    std::int64_t n;
    [[nodiscard]] std::int64_t triple(std::int64_t k) const { return 3 * k % n; }
    [[nodiscard]] std::int64_t dist(std::int64_t from, std::int64_t to) const { return ((to - from) % n + n) % n; }
    // Open arc (a, b); (a, a) is the circle minus a.
    [[nodiscard]] bool inside(std::int64_t a, std::int64_t b, std::int64_t x) const {
        const std::int64_t len = a == b ? n : dist(a, b);
        const std::int64_t d = dist(a, x);
        return d > 0 && d < len;
    }
};

inline std::int64_t mersenne3(int q) {
    std::int64_t n = 1;
    for (int i = 0; i < q; ++i) n *= 3;
    return n - 1;
}

// Exact-period-q cycles on which sigma_3 acts as rotation p/q.
inline std::vector<std::vector<std::int64_t>> rotational_orbits(int p, int q) {
    const IntCircle c{mersenne3(q)};
    std::vector<char> seen(static_cast<std::size_t>(c.n), 0);
    std::vector<std::vector<std::int64_t>> out;
    for (std::int64_t k = 0; k < c.n; ++k) {
        if (seen[k]) continue;
        std::vector<std::int64_t> cyc;
        std::int64_t x = k;
        do {
            cyc.push_back(x);
            seen[x] = 1;
            x = c.triple(x);
        } while (x != k);
        if (static_cast<int>(cyc.size()) != q) continue;
        std::sort(cyc.begin(), cyc.end());
        bool ok = true;
        for (int i = 0; i < q && ok; ++i) {
            auto j = std::lower_bound(cyc.begin(), cyc.end(), c.triple(cyc[i])) - cyc.begin();
            ok = j == (i + p) % q;
        }
        if (ok) out.push_back(std::move(cyc));
    }
    return out;
}

inline std::set<std::pair<std::int64_t, std::int64_t>> edge_orbit(const IntCircle& c, std::int64_t a, std::int64_t b,
                                                                  int q) {
    std::set<std::pair<std::int64_t, std::int64_t>> out;
    for (int i = 0; i < q; ++i) {
        out.emplace(std::min(a, b), std::max(a, b));
        a = c.triple(a);
        b = c.triple(b);
    }
    return out;
}

// Classifies the hull of the sorted invariant set `s`; none if it has no rotation number p/q.
inline std::optional<FiniteGap> classify_set(const IntCircle& c, const std::vector<std::int64_t>& s, int p, int q) {
    const std::size_t m = s.size();
    for (std::size_t i = 0; i < m; ++i) {
        auto j = static_cast<std::size_t>(std::lower_bound(s.begin(), s.end(), c.triple(s[i])) - s.begin());
        if (j >= m || s[j] != c.triple(s[i])) return std::nullopt;
        if (j != (i + m / q * p) % m) return std::nullopt;
    }
    const std::int64_t half = c.n / 2;
    std::vector<std::pair<std::int64_t, std::int64_t>> majors;
    for (std::int64_t target : {std::int64_t{0}, half}) {
        for (std::size_t i = 0; i < m; ++i) {
            const std::int64_t a = s[i], b = s[(i + 1) % m];
            if (c.inside(a, b, target)) {
                if (std::find(majors.begin(), majors.end(), std::pair{a, b}) == majors.end()) majors.emplace_back(a, b);
                break;
            }
        }
    }
    if (majors.empty()) return std::nullopt;
    FiniteGap g;
    for (auto k : s) g.vertices.emplace_back(k, c.n);
    std::sort(g.vertices.begin(), g.vertices.end());
    g.rotation = Rotation{p, q};
    for (auto [a, b] : majors) {
        g.majors.emplace_back(Angle(a, c.n), Angle(b, c.n));
        g.major_holes.push_back(Arc::open(Angle(a, c.n), Angle(b, c.n)));
    }
    if (majors.size() == 1) {
        g.type = FiniteGapType::A;
    } else {
        auto orbit = edge_orbit(c, majors[0].first, majors[0].second, q);
        const auto [a, b] = majors[1];
        g.type = orbit.count({std::min(a, b), std::max(a, b)}) ? FiniteGapType::B : FiniteGapType::D;
    }
    return g;
}

inline FiniteGap degenerate_leaf() {
    FiniteGap g;
    g.vertices = {Angle(0, 1), Angle(1, 2)};
    g.type = FiniteGapType::D;
    g.rotation = Rotation{0, 1};
    g.majors = {Chord(Angle(0, 1), Angle(1, 2)), Chord(Angle(0, 1), Angle(1, 2))};
    g.major_holes = {Arc::open(Angle(1, 2), Angle(0, 1)), Arc::open(Angle(0, 1), Angle(1, 2))};
    g.degenerate_leaf = true;
    return g;
}

inline void check_rotation(int p, int q) {
    if (q < 1 || q > max_finite_gap_period) {
        throw bound_exceeded("rotation denominator " + std::to_string(q) + " outside [1, " +
                             std::to_string(max_finite_gap_period) + "]");
    }
    if (p < 0 || p >= q || std::gcd(p, q) != 1) throw error("rotation " + std::to_string(p) + "/" + std::to_string(q) + " is not reduced in [0, 1)");
}

}  // namespace detail

/// Every finite invariant gap of rotation number p/q whose vertices form one or two periodic orbits.
/// For q = 1 only the degenerate leaf 0-1/2 is returned.
inline std::vector<FiniteGap> enumerate_finite_gaps(int p, int q) {
    detail::check_rotation(p, q);
    if (q == 1) return {detail::degenerate_leaf()};
    const detail::IntCircle c{detail::mersenne3(q)};
    const auto orbits = detail::rotational_orbits(p, q);
    std::vector<FiniteGap> out;
    for (std::size_t i = 0; i < orbits.size(); ++i) {
        if (auto g = detail::classify_set(c, orbits[i], p, q)) out.push_back(std::move(*g));
        for (std::size_t j = i + 1; j < orbits.size(); ++j) {
            std::vector<std::int64_t> s = orbits[i];
            s.insert(s.end(), orbits[j].begin(), orbits[j].end());
            std::sort(s.begin(), s.end());
            if (auto g = detail::classify_set(c, s, p, q)) out.push_back(std::move(*g));
        }
    }
    std::sort(out.begin(), out.end(), [](const FiniteGap& l, const FiniteGap& r) { return l.vertices < r.vertices; });
    return out;
}

inline std::vector<FiniteGap> enumerate_typeD(int p, int q) {
    auto all = enumerate_finite_gaps(p, q);
    std::erase_if(all, [](const FiniteGap& g) { return g.type != FiniteGapType::D; });
    return all;
}

inline QHole typeD_major_to_qhole(const FiniteGap& gap, std::size_t major_index, const QAtlas& atlas) {
    if (gap.type != FiniteGapType::D) throw wrong_type("gap is not of type D");
    if (major_index >= gap.major_holes.size()) throw error("major index out of range");
    if (auto h = hole_with_major(atlas, gap.major_holes[major_index])) return *h;
    throw not_found("no hole of period <= " + std::to_string(atlas.max_period) + " has major " +
                    gap.majors[major_index].str());
}

inline Chord conjugate_major(const FiniteGap& gap, std::size_t major_index) {
    if (gap.type != FiniteGapType::D) throw wrong_type("conjugate majors exist only for type D gaps");
    if (major_index > 1) throw error("major index out of range");
    return gap.majors[1 - major_index];
}

/// A hole is p/q-special when both endpoints of its major are of rotation number p/q.
inline bool is_special(const QHole& hole, int p, int q) {
    for (const Angle& e : {hole.major().a, hole.major().b}) {
        auto r = rotation_number(forward_orbit(3, e));
        if (!r || *r != Rotation{p, q}) return false;
    }
    return true;
}

inline std::vector<QHole> special_holes(int p, int q) {
    detail::check_rotation(p, q);
    if (q > max_atlas_period) throw bound_exceeded("special holes need period <= " + std::to_string(max_atlas_period));
    std::vector<QHole> out;
    for (const auto& h : cached_holes_of_period(q)) {
        if (is_special(h, p, q)) out.push_back(h);
    }
    return out;
}

}  // namespace cubioid
