#pragma once

// Exact rational angles of R/Z, arcs and chords of the closed unit disk,
// and the circle maps sigma_2, sigma_3.

#include <cmath>
#include <compare>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cubioid/error.hpp"

namespace cubioid {

using big_int = boost::multiprecision::cpp_int;
using big_rational = boost::multiprecision::cpp_rational;

/// A point of R/Z with rational argument, kept reduced in [0, 1).
class Angle {
public:
    Angle() = default;
    Angle(const big_int& num, const big_int& den) {
        if (den == 0) throw parse_error("angle with zero denominator");
        value_ = wrap(big_rational(num, den));
    }
    Angle(std::int64_t num, std::int64_t den) : Angle(big_int(num), big_int(den)) {}
    explicit Angle(const big_rational& v) : value_(wrap(v)) {}

    /// Parses "num/den" or an integer (which is the zero angle).
    static Angle parse(std::string_view text) {
        auto slash = text.find('/');
        try {
            if (slash == std::string_view::npos) {
                return Angle(big_int(std::string(trim(text))), big_int(1));
            }
            big_int num(std::string(trim(text.substr(0, slash))));
            big_int den(std::string(trim(text.substr(slash + 1))));
            if (den <= 0) throw parse_error("angle denominator must be positive: " + std::string(text));
            return Angle(num, den);
        } catch (const parse_error&) {
            throw;
        } catch (const std::exception&) {
            throw parse_error("malformed angle: " + std::string(text));
        }
    }

    [[nodiscard]] big_int numerator() const { return boost::multiprecision::numerator(value_); }
    [[nodiscard]] big_int denominator() const { return boost::multiprecision::denominator(value_); }
    [[nodiscard]] const big_rational& value() const noexcept { return value_; }
    [[nodiscard]] double to_double() const { return value_.convert_to<double>(); }
    [[nodiscard]] bool is_zero() const { return value_ == 0; }

    [[nodiscard]] std::string str() const {
        return numerator().str() + "/" + denominator().str();
    }

    /// The circle point e^{2 pi i angle}.
    [[nodiscard]] std::complex<double> point() const {
        return std::polar(1.0, 2.0 * std::numbers::pi * to_double());
    }

    friend Angle operator+(const Angle& a, const Angle& b) { return Angle(a.value_ + b.value_); }
    friend Angle operator-(const Angle& a, const Angle& b) { return Angle(a.value_ - b.value_); }
    friend Angle operator-(const Angle& a) { return Angle(-a.value_); }
    friend Angle operator*(long k, const Angle& a) { return Angle(big_rational(k) * a.value_); }

    friend bool operator==(const Angle& a, const Angle& b) { return a.value_ == b.value_; }
    friend std::strong_ordering operator<=>(const Angle& a, const Angle& b) {
        if (a.value_ < b.value_) return std::strong_ordering::less;
        if (a.value_ > b.value_) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }
    friend std::ostream& operator<<(std::ostream& os, const Angle& a) { return os << a.str(); }

private:
    static std::string_view trim(std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '+')) s.remove_prefix(1);
        while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
        return s;
    }
    static big_rational wrap(const big_rational& v) {
        big_int n = boost::multiprecision::numerator(v);
        big_int d = boost::multiprecision::denominator(v);
        big_int r = n % d;
        if (r < 0) r += d;
        return big_rational(r, d);
    }

    big_rational value_{0};
};

/// Positive circular distance from `from` to `to`, in [0, 1).
inline big_rational forward_distance(const Angle& from, const Angle& to) {
    return (to - from).value();
}

/// An arc of the circle traversed positively from `start` to `end`.
struct Arc {
    Angle start;
    Angle end;
    bool start_closed = true;
    bool end_closed = true;

    Arc() = default;
    Arc(Angle s, Angle e, bool sc = true, bool ec = true)
        : start(std::move(s)), end(std::move(e)), start_closed(sc), end_closed(ec) {
        if (start == end) throw error("degenerate arc " + start.str());
    }
    static Arc open(Angle s, Angle e) { return Arc(std::move(s), std::move(e), false, false); }
    static Arc closed(Angle s, Angle e) { return Arc(std::move(s), std::move(e), true, true); }

    [[nodiscard]] big_rational length() const { return forward_distance(start, end); }

    [[nodiscard]] bool contains(const Angle& x) const {
        if (x == start) return start_closed;
        if (x == end) return end_closed;
        return forward_distance(start, x) < length();
    }

    friend bool operator==(const Arc&, const Arc&) = default;
};

/// An unordered pair of distinct circle points; `a < b` after construction.
struct Chord {
    Angle a;
    Angle b;

    Chord() = default;
    Chord(Angle x, Angle y) {
        if (x == y) throw error("degenerate chord " + x.str());
        if (y < x) std::swap(x, y);
        a = std::move(x);
        b = std::move(y);
    }

    /// Length of the shorter circle arc joining the endpoints, in (0, 1/2].
    [[nodiscard]] big_rational length() const {
        big_rational d = b.value() - a.value();
        return d <= big_rational(1, 2) ? d : big_rational(1) - d;
    }
    [[nodiscard]] bool has_endpoint(const Angle& x) const { return x == a || x == b; }
    [[nodiscard]] std::string str() const { return a.str() + "-" + b.str(); }

    friend bool operator==(const Chord&, const Chord&) = default;
    friend auto operator<=>(const Chord& l, const Chord& r) {
        if (auto c = l.a <=> r.a; c != 0) return c;
        return l.b <=> r.b;
    }
};

inline const Angle& one_third() {
    static const Angle v(1, 3);
    return v;
}
inline const Angle& two_thirds() {
    static const Angle v(2, 3);
    return v;
}

/// The angle-multiplying map sigma_d for d in {2, 3}.
inline Angle sigma(int d, const Angle& theta) {
    if (d != 2 && d != 3) throw error("sigma_d is only defined here for d = 2, 3");
    return Angle(big_rational(d) * theta.value());
}

struct OrbitShape {
    int preperiod = 0;
    int period = 0;
    friend bool operator==(const OrbitShape&, const OrbitShape&) = default;
};

/// Preperiod and eventual period of a rational angle under sigma_d.
/// Always terminates: the orbit lives among fractions with a fixed denominator.
inline OrbitShape orbit_period(int d, const Angle& theta) {
    std::map<Angle, int> first_seen;
    Angle x = theta;
    for (int n = 0;; ++n) {
        auto [it, inserted] = first_seen.emplace(x, n);
        if (!inserted) return {it->second, n - it->second};
        x = sigma(d, x);
    }
}

inline bool is_periodic(int d, const Angle& theta) { return orbit_period(d, theta).preperiod == 0; }

/// The forward orbit theta, sigma(theta), ... up to (excluding) the first repeat.
inline std::vector<Angle> forward_orbit(int d, const Angle& theta) {
    std::vector<Angle> out;
    std::map<Angle, int> seen;
    Angle x = theta;
    while (seen.emplace(x, 0).second) {
        out.push_back(x);
        x = sigma(d, x);
    }
    return out;
}

/// True iff the chords meet inside the open disk and do not coincide.
inline bool chords_cross(const Chord& c1, const Chord& c2) {
    if (c1.has_endpoint(c2.a) || c1.has_endpoint(c2.b)) return false;
    Arc side = Arc::open(c1.a, c1.b);
    return side.contains(c2.a) != side.contains(c2.b);
}

/// The critical chord joining theta + 1/3 and theta + 2/3.
inline Chord critical_chord(const Angle& theta) {
    return Chord(theta + one_third(), theta + two_thirds());
}

/// The three sigma_3-preimages of `y` that lie in `arc`.
inline std::vector<Angle> preimages_in(const Arc& arc, const Angle& y) {
    std::vector<Angle> out;
    for (int k = 0; k < 3; ++k) {
        Angle x((y.value() + k) / 3);
        if (arc.contains(x)) out.push_back(std::move(x));
    }
    return out;
}

}  // namespace cubioid
