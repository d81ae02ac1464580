#pragma once

// Parameter plane of a lambda-slice: the Boettcher-type map Phi(b) = phi_b(omega2*(b)),
// parameter rays, and landing estimates of wakes.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "cubioid/dynamics.hpp"
#include "cubioid/finite_gaps.hpp"
#include "cubioid/multiplier.hpp"
#include "cubioid/q_atlas.hpp"

namespace cubioid {

/// Phi_lambda(b) by the principal-branch product formula at the co-critical point of the faster
/// escaping critical point. Correct far from the connectedness locus only; see phi_param.
inline std::optional<cplx> phi_param_product(cplx lambda, cplx b, const Tolerances& tol = {}) {
    const CubicMap f(lambda, b);
    const auto d = designate_critical(f, tol);
    if (!d) return std::nullopt;
    return bottcher(f, f.cocritical(d->omega2), tol);
}

namespace detail {

// Critical point (-b + sign sqrt(b^2 - 3 lambda)) / 3 and its b-derivative, with the branch
// picked nearest `prev`.
struct CritBranch {
    cplx c;
    cplx dc;
};

inline CritBranch crit_near(cplx lambda, cplx b, cplx prev) {
    const cplx s = std::sqrt(b * b - 3.0 * lambda);
    const cplx c1 = (-b + s) / 3.0, c2 = (-b - s) / 3.0;
    const bool first = std::abs(c1 - prev) <= std::abs(c2 - prev);
    const cplx sg = first ? s : -s;
    const cplx dc = sg == cplx(0) ? cplx(0) : (-1.0 + b / sg) / 3.0;
    return {first ? c1 : c2, dc};
}

struct ParamResidual {
    cplx value;  // (log phi(f^n(w0)) - 3^n(t + 2 pi i theta)) / 3^n, imaginary part reduced
    cplx deriv;  // d/db
    cplx crit;   // omega2 used
};

// Residual of Phi(b) = exp(t + 2 pi i theta), differentiated analytically in b.
inline std::optional<ParamResidual> param_residual(cplx lambda, TurnSequence turns, double t, cplx b, cplx crit_prev,
                                                   const Tolerances& tol) {
    const CubicMap f(lambda, b);
    const auto cb = crit_near(lambda, b, crit_prev);
    cplx w = -b - 2.0 * cb.c;
    cplx dw = -1.0 - 2.0 * cb.dc;
    double scale = 1.0;
    for (int n = 0; n <= tol.max_iter; ++n) {
        if (std::abs(w) > tol.r_big && turns.known()) {
            const auto lp = log_phi_far(f, w);
            const double re = lp.value.real() / scale - t;
            const double im = wrap_pi(lp.value.imag() - 2.0 * std::numbers::pi * turns.turns()) / scale;
            return ParamResidual{cplx(re, im), (lp.d_w * dw + lp.d_b) / scale, cb.c};
        }
        dw = f.derivative(w) * dw + w * w;
        w = f(w);
        if (!std::isfinite(std::abs(w)) || !std::isfinite(std::abs(dw))) return std::nullopt;
        turns.advance();
        scale *= 3.0;
    }
    return std::nullopt;
}

inline std::pair<cplx, cplx> solve_param(cplx lambda, const TurnSequence& theta, double t, cplx guess, cplx crit_prev,
                                          const Tolerances& tol) {
    const double far_radius = 8.0 + 4.0 * std::abs(lambda);
    cplx b = guess;
    auto r = param_residual(lambda, theta, t, b, crit_prev, tol);
    if (!r) throw not_escaping("parameter ray point is in the connectedness locus");
    for (int it = 0; it < tol.max_newton; ++it) {
        if (r->deriv == cplx(0)) throw numerical_stall("zero derivative on parameter ray");
        const bool far = std::abs(b) > far_radius;
        const cplx step = far ? r->value / (r->deriv * b) : r->value / r->deriv;
        double damp = 1.0;
        bool accepted = false;
        for (int h = 0; h < 40; ++h, damp *= 0.5) {
            const cplx cand = far ? b * std::exp(-damp * step) : b - damp * step;
            auto r2 = param_residual(lambda, theta, t, cand, r->crit, tol);
            if (r2 && std::abs(r2->value) < std::abs(r->value) * (1.0 - 0.25 * damp) + 1e-15 * t) {
                b = cand;
                r = r2;
                accepted = true;
                break;
            }
        }
        const double moved = far ? std::abs(damp * step) : std::abs(damp * step) / std::max(1.0, std::abs(b));
        if (moved <= tol.newton_tol) return {b, r->crit};
        if (!accepted) {
            if (std::abs(r->value) < 1e-12 * std::max(1.0, t)) return {b, r->crit};
            throw numerical_stall("parameter Newton step refinement exhausted");
        }
    }
    if (std::abs(r->value) < 1e-10 * std::max(1.0, t)) return {b, r->crit};
    throw numerical_stall("parameter Newton did not converge");
}

// Escape data of the orbit of omega2*: first index n with |w_n| > r_big, the potential, and
// 3^n theta mod 1 read from log phi(w_n).
struct EscapeReading {
    int n = 0;
    double potential = 0;
    double turns = 0;
    bool product_valid = true;  // orbit far enough out for principal branches
};

inline std::optional<EscapeReading> read_escape(cplx lambda, cplx b, cplx crit, const Tolerances& tol) {
    const CubicMap f(lambda, b);
    cplx w = f.cocritical(crit);
    EscapeReading r;
    double scale = 1.0;
    for (int n = 0; n <= tol.max_iter; ++n) {
        if (std::abs(w) > tol.r_big) {
            const auto lp = log_phi_far(f, w);
            r.n = n;
            r.potential = lp.value.real() / scale;
            r.turns = frac(lp.value.imag() / (2.0 * std::numbers::pi));
            return r;
        }
        // Far out f(w)/w^3 is near 4 at omega2* and near 1 further along the orbit.
        const cplx g = 1.0 + b / w + lambda / (w * w);
        if (std::abs(g - (n == 0 ? 4.0 : 1.0)) > (n == 0 ? 1.0 : 0.5)) r.product_valid = false;
        w = f(w);
        scale *= 3.0;
    }
    return std::nullopt;
}

}  // namespace detail

/// Phi_lambda(b), the conformal coordinate of the complement of the connectedness locus; none
/// when both critical orbits stay bounded. Near the locus the angle is found by following the
/// parameter ray outward until the product formula is trustworthy, reading 3^n theta mod 1 at
/// every point, and snapping to the residue class measured at b.
inline std::optional<cplx> phi_param(cplx lambda, cplx b, const Tolerances& tol = {}) {
    const CubicMap f0(lambda, b);
    const auto d = designate_critical(f0, tol);
    if (!d) return std::nullopt;
    const auto start = detail::read_escape(lambda, b, d->omega2, tol);
    if (!start) return std::nullopt;
    if (start->product_valid) return bottcher(f0, f0.cocritical(d->omega2), tol);

    cplx cur = b, crit = d->omega2;
    detail::EscapeReading here = *start;
    const double ratio = std::pow(3.0, 1.0 / 3.0);
    auto solve = [&](const std::pair<cplx, cplx>& from, double, double t_to) {
        return detail::solve_param(lambda, detail::TurnSequence(here.n, here.turns), t_to, from.first, from.second, tol);
    };
    for (int step = 0; !here.product_valid; ++step) {
        if (step > 3 * 400) throw numerical_stall("phi_param: outward continuation did not reach the far region");
        const double t_next = here.potential * ratio;
        std::tie(cur, crit) = detail::verified_step(std::pair<cplx, cplx>{cur, crit}, here.potential, t_next, solve);
        const auto next = detail::read_escape(lambda, cur, crit, tol);
        if (!next) throw numerical_stall("phi_param: outward continuation fell into the locus");
        here = *next;
    }
    const CubicMap f(lambda, cur);
    double theta = detail::frac(std::arg(bottcher(f, f.cocritical(crit), tol)) / (2.0 * std::numbers::pi));
    // Snap: 3^n theta must be congruent to the turns measured at b.
    const double scaled = std::pow(3.0, start->n) * theta - start->turns;
    const double k = std::round(scaled);
    if (std::abs(scaled - k) > 0.1) throw numerical_stall("phi_param: angle lost during continuation");
    if (start->n < 30) theta = detail::frac((start->turns + k) / std::pow(3.0, start->n));
    return std::polar(std::exp(start->potential), 2.0 * std::numbers::pi * theta);
}

inline constexpr double param_start_potential = 6.0;  // log |Phi| of the seed point
inline constexpr int max_param_depth = 560;              // 3^n stays finite in double precision

/// Traces the parameter ray of angle theta from log-potential 6 down `depth` levels
/// (a level divides the potential by 3), `steps_per_level` Newton targets per level.
inline RayTrace trace_param_ray(cplx lambda, const Angle& theta, int depth, int steps_per_level = 8,
                                const Tolerances& tol = {}) {
    if (depth < 1) throw error("trace_param_ray: depth must be at least 1");
    if (depth > max_param_depth) throw bound_exceeded("trace_param_ray: depth above " + std::to_string(max_param_depth));
    if (steps_per_level < 1) throw error("trace_param_ray: steps_per_level must be at least 1");
    RayTrace ray;
    ray.theta = theta;
    const double t0 = param_start_potential;
    // Phi(b) ~ (4/27)^(1/3) b for large b, with omega2 near -2b/3.
    const double c = std::cbrt(4.0 / 27.0);
    cplx b = std::exp(t0) * theta.point() / c;
    cplx crit = -2.0 * b / 3.0;
    const detail::TurnSequence turns(theta);
    std::tie(b, crit) = detail::solve_param(lambda, turns, t0, b, crit, tol);
    ray.points.push_back(b);
    ray.potentials.push_back(t0);
    ray.levels.push_back(0);
    const double far = 8.0 + 4.0 * std::abs(lambda);
    auto solve = [&](const std::pair<cplx, cplx>& from, double t_from, double t_to) {
        const cplx guess = std::abs(from.first) > far ? from.first * std::exp(t_to - t_from) : from.first;
        return detail::solve_param(lambda, turns, t_to, guess, from.second, tol);
    };
    const double ratio = std::pow(3.0, -1.0 / steps_per_level);
    double t = t0;
    for (int level = 1; level <= depth; ++level) {
        for (int j = 1; j <= steps_per_level; ++j) {
            const double t_next = j == steps_per_level ? t0 * std::pow(3.0, -level) : t * ratio;
            std::tie(b, crit) = detail::verified_step(std::pair<cplx, cplx>{b, crit}, t, t_next, solve);
            ray.points.push_back(b);
            ray.potentials.push_back(t_next);
            ray.levels.push_back(level);
            t = t_next;
        }
    }
    const std::size_t tail = std::min(ray.points.size(), static_cast<std::size_t>(3 * steps_per_level + 1));
    double diam = 0;
    for (std::size_t i = ray.points.size() - tail; i < ray.points.size(); ++i) {
        diam = std::max(diam, std::abs(ray.points[i] - ray.points.back()));
    }
    if (diam < tol.land_tol * 10.0) ray.status = Landed{ray.points.back()};
    return ray;
}

/// Number of levels taking log-potential 6 down to `potential`.
inline int levels_to_potential(double potential) {
    return static_cast<int>(std::ceil(std::log(param_start_potential / potential) / std::log(3.0) - 1e-9));
}

/// How a wake root was estimated from ray tails.
enum class LandingMethod {
    Parabolic,     // Newton from the tail onto the nearest parameter with a parabolic cycle
    Extrapolated,  // deep trace, fitted in powers of the level count
};

inline std::string to_string(LandingMethod m) { return m == LandingMethod::Parabolic ? "parabolic" : "extrapolated"; }

struct LandingEstimate {
    cplx b;
    LandingMethod method;
    double error_estimate;  // spread of the estimate; 0 for a converged Newton polish
    cplx tail;              // last traced ray point
    double tail_potential;
};

namespace detail {

// f^k(z) - z as a polynomial in z.
inline BPoly periodic_point_poly(cplx lambda, cplx b, int k) {
    const BPoly f{0.0, lambda, b, 1.0};
    BPoly p{0.0, 1.0};
    for (int i = 0; i < k; ++i) {
        const BPoly p2 = mul(p, p);
        p = add(add(scale(p, lambda), scale(p2, b)), mul(p2, p));
    }
    p[1] -= 1.0;
    return p;
}

struct ParabolicPoint {
    cplx b;
    cplx z;
};

// Newton on f^k(z) = z, ((f^k)'(z))^r = 1 in (z, b).
inline std::optional<ParabolicPoint> polish_parabolic(cplx lambda, cplx b, cplx z, int k, int r) {
    for (int it = 0; it < 60; ++it) {
        cplx w = z, wz = 1.0, wb = 0.0, wzz = 0.0, wzb = 0.0;
        for (int i = 0; i < k; ++i) {
            const cplx d1 = lambda + w * (2.0 * b + 3.0 * w);
            const cplx d2 = 2.0 * b + 6.0 * w;
            const cplx nzz = d2 * wz * wz + d1 * wzz;
            const cplx nzb = d2 * wz * wb + d1 * wzb + 2.0 * w * wz;
            const cplx nb = d1 * wb + w * w;
            wz = d1 * wz;
            wzz = nzz;
            wzb = nzb;
            wb = nb;
            w = w * (lambda + w * (b + w));
        }
        const cplx dr1 = std::pow(wz, r - 1);
        const cplx g1 = w - z, g2 = dr1 * wz - 1.0;
        const cplx a11 = wz - 1.0, a12 = wb;
        const cplx a21 = static_cast<double>(r) * dr1 * wzz, a22 = static_cast<double>(r) * dr1 * wzb;
        const cplx det = a11 * a22 - a12 * a21;
        if (std::abs(det) < 1e-300 || !std::isfinite(std::abs(det))) return std::nullopt;
        const cplx dz = (g1 * a22 - g2 * a12) / det;
        const cplx db = (a11 * g2 - a21 * g1) / det;
        z -= dz;
        b -= db;
        if (!std::isfinite(std::abs(z)) || !std::isfinite(std::abs(b))) return std::nullopt;
        if (std::abs(dz) + std::abs(db) < 1e-14 * std::max(1.0, std::abs(b))) return ParabolicPoint{b, z};
    }
    return std::nullopt;
}

}  // namespace detail

/// Nearest parameter to `b` with a cycle of period dividing q whose multiplier is a root of unity
/// of order q / period and which is not the fixed point 0.
inline std::optional<cplx> nearest_parabolic(cplx lambda, cplx b, int q) {
    std::optional<cplx> best;
    for (int k = 1; k <= q; ++k) {
        if (q % k != 0) continue;
        std::vector<cplx> zs;
        try {
            zs = polynomial_roots(detail::periodic_point_poly(lambda, b, k), 1e-8);
        } catch (const error&) {
            continue;
        }
        for (cplx z : zs) {
            auto p = detail::polish_parabolic(lambda, b, z, k, q / k);
            if (!p || std::abs(p->z) < 1e-8) continue;
            if (!best || std::abs(p->b - b) < std::abs(*best - b)) best = p->b;
        }
    }
    return best;
}

namespace detail {

// Least squares fit b(N) = c0 + c1 u + c2 u^2 + ... with u = (N / N_max)^-alpha; returns c0.
inline cplx extrapolate_levels(const std::vector<double>& n, const std::vector<cplx>& b, double alpha, int terms) {
    const int m = terms + 1;
    std::vector<std::vector<cplx>> a(m, std::vector<cplx>(m + 1, 0.0));
    const double nmax = n.back();
    for (std::size_t i = 0; i < n.size(); ++i) {
        std::vector<double> basis(m, 1.0);
        const double u = std::pow(nmax / n[i], alpha);
        for (int j = 1; j < m; ++j) basis[j] = basis[j - 1] * u;
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < m; ++c) a[r][c] += basis[r] * basis[c];
            a[r][m] += basis[r] * b[i];
        }
    }
    for (int c = 0; c < m; ++c) {  // Gaussian elimination with partial pivoting
        int piv = c;
        for (int r = c + 1; r < m; ++r) {
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        }
        std::swap(a[c], a[piv]);
        for (int r = c + 1; r < m; ++r) {
            const cplx factor = a[r][c] / a[c][c];
            for (int k = c; k <= m; ++k) a[r][k] -= factor * a[c][k];
        }
    }
    std::vector<cplx> x(m);
    for (int r = m - 1; r >= 0; --r) {
        cplx acc = a[r][m];
        for (int c = r + 1; c < m; ++c) acc -= a[r][c] * x[c];
        x[r] = acc / a[r][r];
    }
    return x[0];
}

}  // namespace detail

inline constexpr int default_extrapolation_depth = 400;

/// Landing estimate of the parameter ray of angle theta.
/// Parabolic: trace to `potential`, then polish onto the nearest parabolic parameter of period
/// dividing q; the tail must be approaching it. Extrapolated: trace `deep_depth` levels and fit
/// the level-end points in powers of N^-alpha, alpha measured from the tail and rounded to a half.
inline LandingEstimate estimate_landing(cplx lambda, const Angle& theta, int q, LandingMethod method,
                                        double potential = 1e-6, int deep_depth = default_extrapolation_depth,
                                        const Tolerances& tol = {}) {
    if (method == LandingMethod::Parabolic) {
        const int steps = 4;
        const RayTrace ray = trace_param_ray(lambda, theta, levels_to_potential(potential), steps, tol);
        const cplx tail = ray.points.back();
        auto root = nearest_parabolic(lambda, tail, q);
        if (!root) throw numerical_stall("no parabolic parameter near the ray tail");
        // The last three level ends must approach the root.
        const std::size_t n = ray.points.size();
        double prev = 1e300;
        for (std::size_t i = n - 1 - 3 * steps; i < n; i += steps) {
            const double d = std::abs(ray.points[i] - *root);
            if (d >= prev) throw numerical_stall("ray tail is not approaching the parabolic parameter");
            prev = d;
        }
        return {*root, method, 0.0, tail, ray.potentials.back()};
    }
    if (deep_depth < 16) throw error("estimate_landing: extrapolation needs at least 16 levels");
    const int steps = 2;
    const RayTrace ray = trace_param_ray(lambda, theta, deep_depth, steps, tol);
    std::vector<cplx> ends;  // ends[N - 1] = point at the end of level N
    for (int lv = 1; lv <= deep_depth; ++lv) ends.push_back(ray.points[static_cast<std::size_t>(lv * steps)]);
    const int quarter = deep_depth / 4;
    const cplx d1 = ends[quarter - 1] - ends[2 * quarter - 1];
    const cplx d2 = ends[2 * quarter - 1] - ends[4 * quarter - 1];
    double alpha = std::log2(std::abs(d1) / std::abs(d2));
    alpha = std::max(0.5, std::round(2.0 * alpha) / 2.0);
    std::vector<double> ns;
    std::vector<cplx> bs;
    for (int lv = quarter; lv <= deep_depth; ++lv) {
        ns.push_back(lv);
        bs.push_back(ends[lv - 1]);
    }
    const cplx fit3 = detail::extrapolate_levels(ns, bs, alpha, 3);
    const cplx fit2 = detail::extrapolate_levels(ns, bs, alpha, 2);
    return {fit3, method, std::abs(fit3 - fit2), ray.points.back(), ray.potentials.back()};
}

/// Rotation number p/q with lambda = exp(2 pi i p/q), q <= max_tpoly_q, if any.
inline std::optional<std::pair<int, int>> rational_rotation(cplx lambda) {
    if (std::abs(std::abs(lambda) - 1.0) > 1e-12) return std::nullopt;
    double a = std::arg(lambda) / (2.0 * std::numbers::pi);
    a -= std::floor(a);
    for (int q = 1; q <= max_tpoly_q; ++q) {
        const double pq = a * q;
        const long p = std::lround(pq);
        if (std::abs(pq - p) < 1e-10) return std::pair<int, int>{static_cast<int>(p % q), q};
    }
    return std::nullopt;
}

struct TpqMatch {
    cplx root;
    double distance;
};

struct WakeCheck {
    QHole hole;
    cplx lambda;
    LandingEstimate landing1;
    LandingEstimate landing2;
    double separation = 0;
    double tail_separation = 0;  // raw distance of the two ray tails
    bool special = false;
    std::optional<TpqMatch> tpq_match;

    [[nodiscard]] bool passes(double wake_tol) const { return separation < wake_tol; }
};

/// Traces both rays of the wake of `hole` and compares their landing estimates. Holes that are
/// p/q-special for lambda = exp(2 pi i p/q) are extrapolated and matched against roots of T_{p/q};
/// other holes are polished onto the parabolic root.
inline WakeCheck wake_check(cplx lambda, const QHole& hole, double potential = 1e-6,
                            int deep_depth = default_extrapolation_depth, const Tolerances& tol = {}) {
    if (std::abs(lambda) > 1.0 + 1e-12) throw error("wake_check needs |lambda| <= 1");
    WakeCheck w{hole, lambda, {}, {}, 0, 0, false, std::nullopt};
    const auto rot = rational_rotation(lambda);
    w.special = rot && is_special(hole, rot->first, rot->second);
    const LandingMethod m = w.special ? LandingMethod::Extrapolated : LandingMethod::Parabolic;
    w.landing1 = estimate_landing(lambda, hole.theta1, hole.period, m, potential, deep_depth, tol);
    w.landing2 = estimate_landing(lambda, hole.theta2, hole.period, m, potential, deep_depth, tol);
    w.separation = std::abs(w.landing1.b - w.landing2.b);
    w.tail_separation = std::abs(w.landing1.tail - w.landing2.tail);
    if (w.special) {
        const auto roots = tpoly_roots(tpoly(rot->first, rot->second));
        const cplx mid = 0.5 * (w.landing1.b + w.landing2.b);
        TpqMatch best{roots.front(), std::abs(roots.front() - mid)};
        for (cplx r : roots) {
            if (std::abs(r - mid) < best.distance) best = {r, std::abs(r - mid)};
        }
        w.tpq_match = best;
    }
    return w;
}

}  // namespace cubioid
