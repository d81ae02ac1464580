#pragma once

// Escape-time picture of a lambda-slice in the b-plane, with optional overlays.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <thread>
#include <vector>

#include "cubioid/dynamics.hpp"
#include "cubioid/error.hpp"

namespace cubioid {

struct SliceSpec {
    cplx lambda;
    cplx center = 0.0;
    double width = 6.0;  // extent of the real axis across the image
    int w = 512;
    int h = 512;
    int max_iter = 200;
};

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Image {
    int w = 0;
    int h = 0;
    std::vector<Rgb> pixels;  // row-major, top row first

    Image() = default;
    Image(int w_, int h_) : w(w_), h(h_), pixels(static_cast<std::size_t>(w_) * h_) {}
    [[nodiscard]] Rgb& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * w + x]; }
    [[nodiscard]] const Rgb& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * w + x]; }
    friend bool operator==(const Image&, const Image&) = default;
};

/// Parameter at the centre of pixel (x, y). Offsets are formed from odd integers so that the
/// pixel grid is exactly symmetric about the centre.
inline cplx pixel_to_b(const SliceSpec& s, int x, int y) {
    const double unit = s.width / (2.0 * s.w);
    return s.center + cplx(static_cast<double>(2 * x + 1 - s.w) * unit, static_cast<double>(s.h - 1 - 2 * y) * unit);
}

/// Continuous pixel coordinates of b (inverse of pixel_to_b).
inline std::pair<double, double> b_to_pixel(const SliceSpec& s, cplx b) {
    const double unit = s.width / (2.0 * s.w);
    const cplx d = b - s.center;
    return {(d.real() / unit + s.w - 1) / 2.0, (s.h - 1 - d.imag() / unit) / 2.0};
}

/// Escape time of the faster escaping critical orbit; -1 when both stay bounded for max_iter steps.
inline int slice_escape_time(cplx lambda, cplx b, int max_iter) {
    const CubicMap f(lambda, b);
    const double radius = f.escape_radius();
    const auto e1 = escape_time(f, f.crit1, max_iter, radius);
    const auto e2 = escape_time(f, f.crit2, max_iter, radius);
    if (!e1 && !e2) return -1;
    return std::min(e1.value_or(max_iter + 1), e2.value_or(max_iter + 1));
}

inline Rgb escape_color(int n) {
    if (n < 0) return {0, 0, 0};
    // Slow cycle through a warm palette; the first few bands stay light.
    static constexpr std::array<Rgb, 8> palette{{{250, 250, 245},
                                                 {235, 225, 200},
                                                 {240, 200, 140},
                                                 {225, 150, 90},
                                                 {190, 95, 70},
                                                 {130, 70, 110},
                                                 {80, 90, 160},
                                                 {120, 170, 210}}};
    return palette[static_cast<std::size_t>(n) % palette.size()];
}

/// Escape-time raster. Rows are split over `threads` workers; each pixel is a pure function of
/// its coordinates, so the result does not depend on the thread count.
inline Image render_slice(const SliceSpec& s, int threads = 1) {
    if (s.width <= 0 || s.w <= 0 || s.h <= 0 || s.max_iter <= 0) throw error("render_slice: bad slice spec");
    Image img(s.w, s.h);
    const int n = std::max(1, std::min(threads, s.h));
    auto work = [&](int first) {
        for (int y = first; y < s.h; y += n) {
            for (int x = 0; x < s.w; ++x) img.at(x, y) = escape_color(slice_escape_time(s.lambda, pixel_to_b(s, x, y), s.max_iter));
        }
    };
    if (n == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (int i = 0; i < n; ++i) pool.emplace_back(work, i);
    }
    return img;
}

inline void draw_segment(Image& img, const SliceSpec& s, cplx a, cplx b, Rgb color) {
    auto [x0, y0] = b_to_pixel(s, a);
    auto [x1, y1] = b_to_pixel(s, b);
    const double len = std::max(std::abs(x1 - x0), std::abs(y1 - y0));
    const int steps = static_cast<int>(std::min(len, 4.0 * (img.w + img.h))) + 1;
    for (int i = 0; i <= steps; ++i) {
        const double u = static_cast<double>(i) / steps;
        const long x = std::lround(x0 + u * (x1 - x0));
        const long y = std::lround(y0 + u * (y1 - y0));
        if (x >= 0 && y >= 0 && x < img.w && y < img.h) img.at(static_cast<int>(x), static_cast<int>(y)) = color;
    }
}

inline void draw_polyline(Image& img, const SliceSpec& s, const std::vector<cplx>& pts, Rgb color) {
    for (std::size_t i = 1; i < pts.size(); ++i) draw_segment(img, s, pts[i - 1], pts[i], color);
}

inline void draw_marker(Image& img, const SliceSpec& s, cplx b, Rgb color, int radius = 3) {
    auto [xf, yf] = b_to_pixel(s, b);
    const long cx = std::lround(xf), cy = std::lround(yf);
    for (int d = -radius; d <= radius; ++d) {
        for (auto [x, y] : {std::pair<long, long>{cx + d, cy}, {cx, cy + d}}) {
            if (x >= 0 && y >= 0 && x < img.w && y < img.h) img.at(static_cast<int>(x), static_cast<int>(y)) = color;
        }
    }
}

}  // namespace cubioid
