#pragma once

// Holes of the principal quadratic parameter gap, enumerated period by
// period. A hole (t1, t2) is the fiber over the periodic-type quadratic gap
// whose major is the chord (t1 + 1/3, t2 + 2/3).

#include <algorithm>
#include <cstdint>
#include <future>
#include <iomanip>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cubioid/angle.hpp"

namespace cubioid {

inline constexpr int max_atlas_period = 12;

struct QHole {
    Angle theta1;
    Angle theta2;
    int period = 0;

    /// Major hole of the quadratic gap: positively from theta1 + 1/3 to theta2 + 2/3.
    [[nodiscard]] Arc major_hole() const {
        return Arc::open(theta1 + one_third(), theta2 + two_thirds());
    }
    [[nodiscard]] Chord major() const { return Chord(theta1 + one_third(), theta2 + two_thirds()); }
    [[nodiscard]] Arc arc() const { return Arc::open(theta1, theta2); }
    [[nodiscard]] big_rational length() const { return forward_distance(theta1, theta2); }
    [[nodiscard]] bool contains(const Angle& t) const { return arc().contains(t); }

    friend bool operator==(const QHole&, const QHole&) = default;
};

struct QAtlas {
    int max_period = 0;
    std::vector<QHole> holes;  // sorted by theta1

    [[nodiscard]] big_rational total_length() const {
        big_rational s = 0;
        for (const auto& h : holes) s += h.length();
        return s;
    }
};

namespace detail {

// Periodic cycles of exact period q of k -> 3k mod (3^q - 1).
struct PeriodicTable {
    std::int64_t modulus = 0;
    std::vector<std::int64_t> next_gap;  // 0 when k is not of exact period q
    std::vector<std::int64_t> prev_gap;
};

inline PeriodicTable periodic_table(int q) {
    PeriodicTable t;
    std::int64_t n = 1;
    for (int i = 0; i < q; ++i) n *= 3;
    n -= 1;
    t.modulus = n;
    t.next_gap.assign(static_cast<std::size_t>(n), 0);
    t.prev_gap.assign(static_cast<std::size_t>(n), 0);
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<std::int64_t> cycle;
    for (std::int64_t k = 0; k < n; ++k) {
        if (seen[k]) continue;
        cycle.clear();
        std::int64_t x = k;
        do {
            cycle.push_back(x);
            seen[x] = 1;
            x = 3 * x % n;
        } while (x != k);
        if (static_cast<int>(cycle.size()) != q) continue;
        std::sort(cycle.begin(), cycle.end());
        const std::size_t m = cycle.size();
        for (std::size_t i = 0; i < m; ++i) {
            std::int64_t nxt = cycle[(i + 1) % m];
            std::int64_t gap = ((nxt - cycle[i]) % n + n) % n;
            if (gap == 0) gap = n;
            t.next_gap[cycle[i]] = gap;
            t.prev_gap[nxt] = gap;
        }
    }
    return t;
}

}  // namespace detail

/// All holes whose major has exact sigma_3-period q, sorted by theta1.
///
/// A chord (a, b) of exact period q is a major with hole (a, b) when
///  - the hole has length > 1/3 (and at most 1/2),
///  - neither endpoint orbit enters the open arc (a, b),
///  - every later image hole (3^i a, 3^i b), 0 < i < q, is shorter than 1/3.
inline std::vector<QHole> holes_of_period(int q) {
    if (q < 1 || q > max_atlas_period) {
        throw bound_exceeded("period " + std::to_string(q) + " outside [1, " +
                             std::to_string(max_atlas_period) + "]");
    }
    const detail::PeriodicTable t = detail::periodic_table(q);
    const std::int64_t n = t.modulus;
    auto longer_than_third = [n](std::int64_t len) { return 3 * len > n; };

    std::vector<std::int64_t> b_candidates;
    for (std::int64_t k = 0; k < n; ++k) {
        if (t.prev_gap[k] != 0 && longer_than_third(t.prev_gap[k])) b_candidates.push_back(k);
    }

    std::vector<QHole> out;
    for (std::int64_t a = 0; a < n; ++a) {
        const std::int64_t gap = t.next_gap[a];
        if (gap == 0 || !longer_than_third(gap)) continue;
        std::int64_t max_len = std::min(gap, q == 1 ? n / 2 : (4 * n - 1) / 9);
        // b runs over (a + n/3, a + max_len], possibly wrapping past n.
        std::int64_t lo = a + n / 3 + 1;
        std::int64_t hi = a + max_len;
        for (std::int64_t pass = 0; pass < 2; ++pass) {
            std::int64_t from = lo - pass * n;
            std::int64_t to = hi - pass * n;
            if (to < 0 || from >= n) continue;
            auto it = std::lower_bound(b_candidates.begin(), b_candidates.end(), std::max<std::int64_t>(from, 0));
            for (; it != b_candidates.end() && *it <= to; ++it) {
                const std::int64_t b = *it;
                const std::int64_t len = ((b - a) % n + n) % n;
                if (!longer_than_third(len) || len > gap || len > t.prev_gap[b]) continue;
                bool ok = true;
                std::int64_t x = a, y = b;
                for (int i = 1; i < q && ok; ++i) {
                    x = 3 * x % n;
                    y = 3 * y % n;
                    ok = 3 * (((y - x) % n + n) % n) < n;
                }
                if (!ok) continue;
                QHole h;
                h.theta1 = Angle(a, n) - one_third();
                h.theta2 = Angle(b, n) - two_thirds();
                h.period = q;
                out.push_back(std::move(h));
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const QHole& l, const QHole& r) { return l.theta1 < r.theta1; });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Memoized holes_of_period; safe to call from several threads.
inline const std::vector<QHole>& cached_holes_of_period(int q) {
    static std::mutex mu;
    static std::vector<std::optional<std::vector<QHole>>> cache(max_atlas_period + 1);
    if (q < 1 || q > max_atlas_period) {
        throw bound_exceeded("period " + std::to_string(q) + " outside [1, " + std::to_string(max_atlas_period) + "]");
    }
    std::lock_guard lock(mu);
    if (!cache[q]) cache[q] = holes_of_period(q);
    return *cache[q];
}

inline QAtlas enumerate_holes(int max_period) {
    if (max_period < 1 || max_period > max_atlas_period) {
        throw bound_exceeded("max_period " + std::to_string(max_period) + " outside [1, " +
                             std::to_string(max_atlas_period) + "]");
    }
    std::vector<std::future<const std::vector<QHole>*>> jobs;
    for (int q = 1; q <= max_period; ++q) {
        jobs.push_back(std::async(std::launch::async, [q] { return &cached_holes_of_period(q); }));
    }
    QAtlas atlas;
    atlas.max_period = max_period;
    for (auto& j : jobs) {
        const auto* hs = j.get();
        atlas.holes.insert(atlas.holes.end(), hs->begin(), hs->end());
    }
    std::sort(atlas.holes.begin(), atlas.holes.end(),
              [](const QHole& l, const QHole& r) { return l.theta1 < r.theta1; });
    return atlas;
}

inline std::optional<QHole> hole_containing(const QAtlas& atlas, const Angle& theta) {
    for (const auto& h : atlas.holes) {
        if (h.contains(theta)) return h;
    }
    return std::nullopt;
}

/// The hole, of period at most max_period, whose major hole is exactly `major_hole`.
inline std::optional<QHole> hole_with_major(const QAtlas& atlas, const Arc& major_hole) {
    for (const auto& h : atlas.holes) {
        auto mh = h.major_hole();
        if (mh.start == major_hole.start && mh.end == major_hole.end) return h;
    }
    return std::nullopt;
}

/// SVG drawing of the unit circle with one chord per hole.
inline std::string render_q_svg(const QAtlas& atlas, int size) {
    if (size < 64) throw error("render_q: size must be at least 64");
    const double c = size / 2.0;
    const double r = size / 2.0 - 4.0;
    std::ostringstream os;
    os << std::fixed << std::setprecision(4);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
       << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
    os << "<circle cx=\"" << c << "\" cy=\"" << c << "\" r=\"" << r
       << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    for (const auto& h : atlas.holes) {
        auto p = h.theta1.point();
        auto s = h.theta2.point();
        // SVG y grows downwards.
        os << "<line class=\"hole\" data-period=\"" << h.period << "\" x1=\"" << c + r * p.real()
           << "\" y1=\"" << c - r * p.imag() << "\" x2=\"" << c + r * s.real() << "\" y2=\""
           << c - r * s.imag() << "\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace cubioid
