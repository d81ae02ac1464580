#pragma once

// Dynamical plane of f(z) = lambda z + b z^2 + z^3: escape, Green function,
// Boettcher coordinate, external rays and their landing points.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cubioid/angle.hpp"
#include "cubioid/error.hpp"
#include "cubioid/multiplier.hpp"

namespace cubioid {

/// Every numerical tolerance of the ray machinery.
struct Tolerances {
    double r_big = 1e8;         // escape radius for the Boettcher tail
    double land_tol = 1e-8;     // tail diameter accepted as landing
    double crash_tol = 1e-4;    // relative distance to a precritical point counted as a crash
    double newton_tol = 1e-13;  // relative Newton step size accepted as converged
    int max_newton = 64;
    int max_iter = 100000;      // iteration budget when deciding escape
};

struct CubicMap {
    cplx lambda;
    cplx b;
    cplx crit1;  // (-b + s) / 3, s = sqrt(b^2 - 3 lambda)
    cplx crit2;  // (-b - s) / 3

    CubicMap(cplx lambda_, cplx b_) : lambda(lambda_), b(b_) {
        const cplx s = std::sqrt(b * b - 3.0 * lambda);
        crit1 = (-b + s) / 3.0;
        crit2 = (-b - s) / 3.0;
    }

    [[nodiscard]] cplx operator()(cplx z) const { return z * (lambda + z * (b + z)); }
    [[nodiscard]] cplx derivative(cplx z) const { return lambda + z * (2.0 * b + 3.0 * z); }
    /// The point other than c with the same image as the critical point c.
    [[nodiscard]] cplx cocritical(cplx c) const { return -b - 2.0 * c; }
    [[nodiscard]] cplx cocrit2() const { return cocritical(crit2); }

    /// |z| > radius implies |f(z)| > 2 |z|.
    [[nodiscard]] double escape_radius() const { return std::max(2.0, std::abs(lambda) + std::abs(b) + 2.0); }
};

/// First n with |f^n(z)| > radius, or none within max_iter.
inline std::optional<int> escape_time(const CubicMap& f, cplx z, int max_iter, double radius) {
    for (int n = 0; n <= max_iter; ++n) {
        if (std::abs(z) > radius) return n;
        if (n == max_iter) break;
        z = f(z);
    }
    return std::nullopt;
}

namespace detail {

struct LogPhi {
    cplx value;  // log phi(w), principal branches throughout
    cplx d_w;    // d/dw
    cplx d_b;    // d/db at fixed w
};

// log phi(w) = log w + sum_k 3^-(k+1) Log(f(w_k) / w_k^3) for |w| large.
inline LogPhi log_phi_far(const CubicMap& f, cplx w) {
    LogPhi r{std::log(w), 1.0 / w, 0.0};
    cplx wk = w, dw = 1.0, db = 0.0;  // w_k and its partials in w and b
    double weight = 1.0 / 3.0;
    for (int k = 0; k < 8; ++k) {
        const cplx inv = 1.0 / wk;
        const cplx g = 1.0 + inv * (f.b + f.lambda * inv);
        // d log g = (-(b/w^2) - 2 lambda / w^3) dw / g + (1/w) db / g
        const cplx gw = -inv * inv * (f.b + 2.0 * f.lambda * inv) / g;
        const cplx gb = inv / g;
        r.value += weight * std::log(g);
        r.d_w += weight * gw * dw;
        r.d_b += weight * (gw * db + gb);
        if (std::abs(g - 1.0) < 1e-19) break;
        const cplx next = f(wk);
        db = f.derivative(wk) * db + wk * wk;
        dw = f.derivative(wk) * dw;
        wk = next;
        weight /= 3.0;
        if (!std::isfinite(std::abs(wk))) break;
    }
    return r;
}

inline double frac(double x) { return x - std::floor(x); }

// The angles 3^n theta mod 1 for n = 0, 1, ...: exact from a rational angle, or known only from
// some index on, from a measured value there.
class TurnSequence {
public:
    explicit TurnSequence(const Angle& theta) : exact_(theta) {}
    TurnSequence(int index, double turns) : from_(index), value_(turns) {}

    [[nodiscard]] bool known() const { return n_ >= from_; }
    [[nodiscard]] double turns() const { return exact_ ? exact_->to_double() : value_; }
    void advance() {
        ++n_;
        if (exact_) {
            *exact_ = sigma(3, *exact_);
        } else if (n_ > from_) {
            value_ = frac(3.0 * value_);
        }
    }

private:
    std::optional<Angle> exact_;
    int from_ = 0;
    int n_ = 0;
    double value_ = 0;
};

inline double wrap_pi(double x) {
    x = std::remainder(x, 2.0 * std::numbers::pi);
    return x;
}

}  // namespace detail

/// Green function G(z) = lim log|f^n z| / 3^n; none if z does not reach r_big within max_iter.
inline std::optional<double> green(const CubicMap& f, cplx z, const Tolerances& tol = {}) {
    for (int n = 0; n <= tol.max_iter; ++n) {
        if (std::abs(z) > tol.r_big) return detail::log_phi_far(f, z).value.real() / std::pow(3.0, n);
        z = f(z);
    }
    return std::nullopt;
}

/// Boettcher coordinate by the product formula phi(z) = z prod (f(z_k) / z_k^3)^(1/3^(k+1)).
inline cplx bottcher(const CubicMap& f, cplx z, const Tolerances& tol = {}) {
    cplx logphi = std::log(z);
    double weight = 1.0 / 3.0;
    cplx w = z;
    for (int n = 0; n <= tol.max_iter; ++n) {
        if (std::abs(w) > tol.r_big) {
            logphi += weight * 3.0 * (detail::log_phi_far(f, w).value - std::log(w));
            return std::exp(logphi);
        }
        if (w == cplx(0)) break;
        const cplx next = f(w);
        logphi += weight * std::log(next / (w * w * w));
        w = next;
        weight /= 3.0;
    }
    throw not_escaping("bottcher: orbit stays below r_big");
}

/// Which critical point escapes faster. Undetermined when neither escapes or the rates tie.
struct CriticalDesignation {
    cplx omega1;  // slower / non-escaping
    cplx omega2;  // faster escaping
    double g2 = 0;
};

inline std::optional<CriticalDesignation> designate_critical(const CubicMap& f, const Tolerances& tol = {}) {
    const auto g1 = green(f, f.crit1, tol);
    const auto g2 = green(f, f.crit2, tol);
    if (!g1 && !g2) return std::nullopt;
    const double a = g1.value_or(0.0), c = g2.value_or(0.0);
    if (std::abs(a - c) <= 1e-12 * std::max(a, c)) throw undetermined("critical points escape at the same rate");
    if (a > c) return CriticalDesignation{f.crit2, f.crit1, a};
    return CriticalDesignation{f.crit1, f.crit2, c};
}

struct Landed {
    cplx z;
};
struct Crashed {
    cplx near;
};
struct MaxDepth {};
using RayStatus = std::variant<Landed, Crashed, MaxDepth>;

inline std::string status_name(const RayStatus& s) {
    if (std::holds_alternative<Landed>(s)) return "landed";
    if (std::holds_alternative<Crashed>(s)) return "crashed";
    return "max-depth";
}

struct RayTrace {
    Angle theta;
    std::vector<cplx> points;
    std::vector<double> potentials;  // strictly decreasing
    std::vector<int> levels;         // level index of each point (0 = seed)
    RayStatus status = MaxDepth{};

    [[nodiscard]] bool landed() const { return std::holds_alternative<Landed>(status); }
    [[nodiscard]] bool crashed() const { return std::holds_alternative<Crashed>(status); }
};

namespace detail {

// Solves log phi(f^n z) = 3^n (t + 2 pi i theta) for z near `guess`, with the
// angle 3^n theta reduced exactly, so no branch of log phi has to be tracked. Returns the converged point.
inline cplx solve_on_ray(const CubicMap& f, const Angle& theta, double t, cplx guess, const Tolerances& tol) {
    auto residual = [&](cplx z, cplx* deriv) -> std::optional<cplx> {
        cplx w = z, dw = 1.0;
        Angle arg = theta;
        double scale = 1.0;
        for (int n = 0; n <= tol.max_iter; ++n) {
            if (std::abs(w) > tol.r_big) {
                const auto lp = log_phi_far(f, w);
                // Divided by 3^n so the residual stays continuous where n changes.
                const double re = lp.value.real() / scale - t;
                const double im = wrap_pi(lp.value.imag() - 2.0 * std::numbers::pi * arg.to_double()) / scale;
                *deriv = lp.d_w * dw / scale;
                return cplx(re, im);
            }
            dw = f.derivative(w) * dw;
            w = f(w);
            arg = sigma(3, arg);
            scale *= 3.0;
        }
        return std::nullopt;
    };
    const double far_radius = 4.0 * f.escape_radius();
    cplx z = guess;
    cplx d;
    auto r = residual(z, &d);
    if (!r) throw not_escaping("ray point does not escape");
    for (int it = 0; it < tol.max_newton; ++it) {
        if (d == cplx(0)) throw numerical_stall("zero derivative on ray");
        // Far out, log phi is nearly log z: step in log z there.
        const bool far = std::abs(z) > far_radius;
        const cplx step = far ? *r / (d * z) : *r / d;
        double damp = 1.0;
        bool accepted = false;
        for (int h = 0; h < 30; ++h, damp *= 0.5) {
            cplx d2;
            const cplx cand = far ? z * std::exp(-damp * step) : z - damp * step;
            auto r2 = residual(cand, &d2);
            if (r2 && std::abs(*r2) < std::abs(*r) * (1.0 - 0.25 * damp) + 1e-14) {
                z = cand;
                r = r2;
                d = d2;
                accepted = true;
                break;
            }
        }
        if (far) {
            if (std::abs(damp * step) <= tol.newton_tol) return z;
        } else if (std::abs(damp * step) <= tol.newton_tol * std::max(1.0, std::abs(z))) {
            return z;
        }
        if (!accepted) {
            // No decrease possible: already at the rounding floor.
            if (std::abs(*r) < 1e-11) return z;
            throw numerical_stall("ray Newton step refinement exhausted");
        }
    }
    if (std::abs(*r) < 1e-10) return z;
    throw numerical_stall("ray Newton did not converge");
}

}  // namespace detail

namespace detail {

// One potential step t_from -> t_to along a ray, checked against the same step taken as two
// halves; disagreement means a Newton solve slid onto a neighbouring ray, so the step is split.
template <class State, class Solve>
State verified_step(const State& from, double t_from, double t_to, const Solve& solve, int budget = 12) {
    const State direct = solve(from, t_from, t_to);
    const double t_mid = t_from * std::sqrt(t_to / t_from);
    const State mid = solve(from, t_from, t_mid);
    const State two = solve(mid, t_mid, t_to);
    // A neighbouring solution sits a sizeable fraction of a step away; rounding is far below that.
    const double step = std::abs(two.first - from.first);
    const double slack = 1e-4 * step + 1e-12 * std::max(1.0, std::abs(two.first));
    if (std::abs(direct.first - two.first) <= slack) return two;
    if (budget == 0) throw numerical_stall("ray step keeps splitting");
    const State half = verified_step(from, t_from, t_mid, solve, budget - 1);
    return verified_step(half, t_mid, t_to, solve, budget - 1);
}

}  // namespace detail

/// Traces R_f(theta) from potential log(r_big) down `depth` levels (a level divides the potential by 3).
/// Stops at a crash into an escaping precritical point.
inline RayTrace trace_dynamic_ray(const CubicMap& f, const Angle& theta, int depth, int steps_per_level,
                                  const Tolerances& tol = {}) {
    if (depth < 1) throw error("trace_dynamic_ray: depth must be at least 1");
    if (steps_per_level < 1) throw error("trace_dynamic_ray: steps_per_level must be at least 1");
    RayTrace ray;
    ray.theta = theta;
    const double t0 = std::log(tol.r_big);
    cplx z = tol.r_big * theta.point() - f.b / 3.0;
    z = detail::solve_on_ray(f, theta, t0, z, tol);
    ray.points.push_back(z);
    ray.potentials.push_back(t0);
    ray.levels.push_back(0);

    // Escaping critical points and their potentials: rays can only crash at
    // potentials g / 3^j, onto points mapped to the critical point by f^j.
    std::vector<std::pair<cplx, double>> crit;
    for (cplx c : {f.crit1, f.crit2}) {
        if (auto g = green(f, c, tol); g && *g > 0) crit.emplace_back(c, *g);
    }

    const double far = 4.0 * f.escape_radius();
    auto solve = [&](const std::pair<cplx, int>& from, double t_from, double t_to) {
        const cplx guess = std::abs(from.first) > far ? from.first * std::exp(t_to - t_from) : from.first;
        return std::pair<cplx, int>{detail::solve_on_ray(f, theta, t_to, guess, tol), 0};
    };
    const double ratio = std::pow(3.0, -1.0 / steps_per_level);
    double t = t0;
    for (int level = 1; level <= depth; ++level) {
        for (int j = 1; j <= steps_per_level; ++j) {
            const double t_next = j == steps_per_level ? t0 * std::pow(3.0, -level) : t * ratio;
            for (const auto& [c, g] : crit) {
                // Is there a crash potential g / 3^m in [t_next, t)?
                const double m = std::ceil(std::log(g / t) / std::log(3.0) - 1e-12);
                const double tc = g * std::pow(3.0, -m);
                if (m < 0 || tc < t_next || tc >= t) continue;
                cplx zc = detail::solve_on_ray(f, theta, tc, z, tol);
                cplx w = zc;
                for (int i = 0; i < static_cast<int>(m); ++i) w = f(w);
                if (std::abs(w - c) < tol.crash_tol * std::max(1.0, std::abs(c))) {
                    ray.points.push_back(zc);
                    ray.potentials.push_back(tc);
                    ray.levels.push_back(level);
                    ray.status = Crashed{zc};
                    return ray;
                }
            }
            z = detail::verified_step(std::pair<cplx, int>{z, 0}, t, t_next, solve).first;
            ray.points.push_back(z);
            ray.potentials.push_back(t_next);
            ray.levels.push_back(level);
            t = t_next;
        }
        // Landed once the tail over the last three levels is small enough.
        if (level >= 3) {
            const std::size_t tail = static_cast<std::size_t>(3 * steps_per_level + 1);
            double diam = 0;
            for (std::size_t i = ray.points.size() - tail; i < ray.points.size(); ++i) {
                diam = std::max(diam, std::abs(ray.points[i] - ray.points.back()));
            }
            if (diam < tol.land_tol) {
                ray.status = Landed{ray.points.back()};
                return ray;
            }
        }
    }
    return ray;
}

/// Periodic point of period p near `guess` by Newton on f^p(z) - z.
inline cplx refine_periodic_point(const CubicMap& f, cplx guess, int period, const Tolerances& tol = {}) {
    cplx z = guess;
    for (int it = 0; it < tol.max_newton; ++it) {
        cplx w = z, dw = 1.0;
        for (int i = 0; i < period; ++i) {
            dw = f.derivative(w) * dw;
            w = f(w);
        }
        if (dw == cplx(1.0)) throw ill_conditioned("periodic point is parabolic");
        const cplx step = (w - z) / (dw - 1.0);
        z -= step;
        if (std::abs(step) <= tol.newton_tol * std::max(1.0, std::abs(z))) return z;
    }
    throw numerical_stall("periodic point Newton did not converge");
}

/// Multiplier (f^p)'(z) of the cycle through z.
inline cplx cycle_multiplier(const CubicMap& f, cplx z, int period) {
    cplx d = 1.0;
    for (int i = 0; i < period; ++i) {
        d *= f.derivative(z);
        z = f(z);
    }
    return d;
}

struct Landing {
    RayStatus status;
    cplx point;      // refined landing point, or the crash point
    double residual; // |f^period(z) - z| for periodic arguments
};

/// Landing point of R_f(theta). For periodic theta the tail is refined to the periodic point.
inline Landing landing_point(const CubicMap& f, const Angle& theta, int depth = 40, int steps_per_level = 4,
                             const Tolerances& tol = {}) {
    RayTrace ray = trace_dynamic_ray(f, theta, depth, steps_per_level, tol);
    if (auto* c = std::get_if<Crashed>(&ray.status)) return {ray.status, c->near, 0.0};
    const auto shape = orbit_period(3, theta);
    cplx z = ray.points.back();
    double residual = 0.0;
    if (shape.preperiod == 0) {
        const cplx refined = refine_periodic_point(f, z, shape.period, tol);
        // The refined point must sit where the tail is heading.
        const double tail = std::abs(ray.points.back() - ray.points[ray.points.size() - 1 - steps_per_level]);
        if (std::abs(refined - z) > 10.0 * tail + 1e-6) return {MaxDepth{}, z, 0.0};
        z = refined;
        cplx w = z;
        for (int i = 0; i < shape.period; ++i) w = f(w);
        residual = std::abs(w - z);
        return {Landed{z}, z, residual};
    }
    return {ray.status, z, residual};
}

}  // namespace cubioid
