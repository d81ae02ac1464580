#pragma once

// The multiplier polynomial T_{p/q}(b): the z^{q+1} coefficient of the q-th
// iterate of f(z) = lambda z + b z^2 + z^3 at lambda = exp(2 pi i p/q).

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <vector>

#include "cubioid/error.hpp"

namespace cubioid {

using cplx = std::complex<double>;

/// Polynomial in b, coefficients from the constant term up.
using BPoly = std::vector<cplx>;

inline constexpr int max_tpoly_q = 16;

inline int degree(const BPoly& p, double tol = 0.0) {
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i) {
        if (std::abs(p[i]) > tol) return i;
    }
    return -1;
}

inline cplx evaluate(const BPoly& p, cplx b) {
    cplx r = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * b + *it;
    return r;
}

namespace detail {

inline BPoly add(const BPoly& x, const BPoly& y) {
    BPoly r(std::max(x.size(), y.size()));
    for (std::size_t i = 0; i < x.size(); ++i) r[i] += x[i];
    for (std::size_t i = 0; i < y.size(); ++i) r[i] += y[i];
    return r;
}

inline BPoly mul(const BPoly& x, const BPoly& y) {
    if (x.empty() || y.empty()) return {};
    BPoly r(x.size() + y.size() - 1);
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < y.size(); ++j) r[i + j] += x[i] * y[j];
    }
    return r;
}

inline BPoly scale(const BPoly& x, cplx s) {
    BPoly r = x;
    for (auto& c : r) c *= s;
    return r;
}

inline BPoly shift_b(const BPoly& x) {  // multiply by b
    if (x.empty()) return {};
    BPoly r(x.size() + 1);
    std::copy(x.begin(), x.end(), r.begin() + 1);
    return r;
}

}  // namespace detail

/// Power series in z with coefficients in C[b], truncated after z^order.
struct TruncatedSeries {
    int order = 0;
    std::vector<BPoly> coeffs;  // coeffs[n] multiplies z^n; coeffs[0] is unused

    static TruncatedSeries identity(int order) {
        TruncatedSeries s;
        s.order = order;
        s.coeffs.assign(static_cast<std::size_t>(order) + 1, BPoly{});
        s.coeffs[1] = BPoly{1.0};
        return s;
    }

    [[nodiscard]] TruncatedSeries times(const TruncatedSeries& o) const {
        TruncatedSeries r;
        r.order = order;
        r.coeffs.assign(static_cast<std::size_t>(order) + 1, BPoly{});
        for (int i = 1; i <= order; ++i) {
            if (coeffs[i].empty()) continue;
            for (int j = 1; i + j <= order; ++j) {
                if (o.coeffs[j].empty()) continue;
                r.coeffs[i + j] = detail::add(r.coeffs[i + j], detail::mul(coeffs[i], o.coeffs[j]));
            }
        }
        return r;
    }
};

/// f o s, i.e. lambda s + b s^2 + s^3, truncated at the order of s.
inline TruncatedSeries compose_series(const TruncatedSeries& s, cplx lambda) {
    const TruncatedSeries s2 = s.times(s);
    const TruncatedSeries s3 = s2.times(s);
    TruncatedSeries r = s;
    for (int n = 1; n <= s.order; ++n) {
        r.coeffs[n] = detail::add(detail::add(detail::scale(s.coeffs[n], lambda), detail::shift_b(s2.coeffs[n])),
                                  s3.coeffs[n]);
    }
    return r;
}

struct MultiplierPoly {
    int p = 0;
    int q = 1;
    BPoly coefficients;  // degree q

    [[nodiscard]] cplx operator()(cplx b) const { return evaluate(coefficients, b); }
    [[nodiscard]] double norm() const {
        double s = 0;
        for (auto c : coefficients) s = std::max(s, std::abs(c));
        return s;
    }
};

inline cplx root_of_unity(int p, int q) { return std::polar(1.0, 2.0 * std::numbers::pi * p / q); }

/// The q-fold composition series of f at lambda = exp(2 pi i p/q), through z^{q+1}.
inline TruncatedSeries iterate_series(int p, int q) {
    const cplx lambda = root_of_unity(p, q);
    TruncatedSeries s = TruncatedSeries::identity(q + 1);
    for (int i = 0; i < q; ++i) s = compose_series(s, lambda);
    return s;
}

inline MultiplierPoly tpoly(int p, int q) {
    if (q < 1 || q > max_tpoly_q) throw bound_exceeded("tpoly needs 1 <= q <= " + std::to_string(max_tpoly_q));
    if (p < 0 || p >= q || std::gcd(p, q) != 1) throw error("rotation must be reduced with 0 <= p < q");
    const TruncatedSeries s = iterate_series(p, q);
    MultiplierPoly t{p, q, s.coeffs[q + 1]};
    t.coefficients.resize(static_cast<std::size_t>(q) + 1);
    return t;
}

/// All roots of a polynomial: Aberth iteration from points on a circle, then Newton polish.
inline std::vector<cplx> polynomial_roots(const BPoly& poly, double rel_tol = 1e-12) {
    const int n = degree(poly);
    if (n < 1) throw error("polynomial_roots: degree must be positive");
    BPoly mon(poly.begin(), poly.begin() + n + 1);
    const cplx lead = mon[n];
    for (auto& c : mon) c /= lead;
    BPoly dmon(n);
    for (int i = 1; i <= n; ++i) dmon[i - 1] = mon[i] * static_cast<double>(i);

    double radius = 0;  // Cauchy bound
    for (int i = 0; i < n; ++i) radius = std::max(radius, std::abs(mon[i]));
    radius = std::max(radius, 1e-3);
    std::vector<cplx> z(n);
    for (int k = 0; k < n; ++k) z[k] = std::polar(radius * 0.9 + 0.1, 2.0 * std::numbers::pi * (k + 0.25) / n);

    double scale_norm = 0;
    for (auto c : mon) scale_norm = std::max(scale_norm, std::abs(c));
    for (int iter = 0; iter < 500; ++iter) {
        double move = 0;
        for (int k = 0; k < n; ++k) {
            const cplx pk = evaluate(mon, z[k]);
            if (pk == cplx(0)) continue;
            const cplx ratio = pk / evaluate(dmon, z[k]);
            cplx sum = 0;
            for (int j = 0; j < n; ++j) {
                if (j != k) sum += 1.0 / (z[k] - z[j]);
            }
            const cplx w = ratio / (1.0 - ratio * sum);
            z[k] -= w;
            move = std::max(move, std::abs(w) / std::max(1.0, std::abs(z[k])));
        }
        if (move < 1e-15) break;
    }
    for (auto& r : z) {
        for (int it = 0; it < 8; ++it) {
            const cplx d = evaluate(dmon, r);
            if (std::abs(d) < 1e-300) break;
            const cplx step = evaluate(mon, r) / d;
            r -= step;
            if (std::abs(step) <= 1e-17 * std::max(1.0, std::abs(r))) break;
        }
        double mag = 0;  // evaluation scale: sum |c_i| |r|^i
        for (int i = n; i >= 0; --i) mag = mag * std::abs(r) + std::abs(mon[i]);
        if (std::abs(evaluate(mon, r)) > rel_tol * std::max(scale_norm, mag)) {
            throw ill_conditioned("root refinement did not converge");
        }
    }
    std::sort(z.begin(), z.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return z;
}

inline std::vector<cplx> tpoly_roots(const MultiplierPoly& tp) { return polynomial_roots(tp.coefficients); }

}  // namespace cubioid
