#pragma once

// Synthetic data shared by the unit and acceptance suites.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "hazemix/airlight.hpp"
#include "hazemix/density.hpp"
#include "hazemix/image.hpp"
#include "hazemix/random.hpp"

namespace hazemix::fixture {

inline BrightnessImage random_brightness(int w, int h, Rng& rng, int lo = 0, int hi = 255) {
    std::vector<Level> data(static_cast<std::size_t>(w) * h);
    for (auto& v : data) v = static_cast<Level>(lo + rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
    return BrightnessImage(w, h, std::move(data));
}

inline RgbImage random_rgb(int w, int h, Rng& rng) {
    std::vector<Level> data(static_cast<std::size_t>(w) * h * 3);
    for (auto& v : data) v = static_cast<Level>(rng.below(256));
    return RgbImage(w, h, std::move(data));
}

/// Random normalized histogram with roughly `support` nonzero bins.
inline DensityHistogram random_histogram(Rng& rng, int support = 40) {
    DensityHistogram::Bins bins{};
    double sum = 0.0;
    for (int i = 0; i < support; ++i) {
        const double w = rng.uniform();
        bins[rng.below(kLevels)] += w;
        sum += w;
    }
    for (auto& b : bins) b /= sum;
    double check = 0.0;
    for (double b : bins) check += b;
    bins[0] += 1.0 - check;  // absorb rounding so the sum is exactly representable
    if (bins[0] < 0.0) bins[0] = 0.0;
    return DensityHistogram(bins, 1000);
}

/// Bilinear value noise on a `cell`-pixel lattice.
inline std::vector<double> value_noise(int w, int h, int cell, Rng& rng, double lo, double hi) {
    const int gw = w / cell + 2;
    const int gh = h / cell + 2;
    std::vector<double> lattice(static_cast<std::size_t>(gw) * gh);
    for (auto& v : lattice) v = rng.uniform(lo, hi);
    std::vector<double> out(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double fx = static_cast<double>(x) / cell;
            const double fy = static_cast<double>(y) / cell;
            const int x0 = static_cast<int>(fx);
            const int y0 = static_cast<int>(fy);
            const double ax = fx - x0;
            const double ay = fy - y0;
            auto g = [&](int i, int j) { return lattice[static_cast<std::size_t>(j) * gw + i]; };
            out[static_cast<std::size_t>(y) * w + x] =
                (1 - ax) * (1 - ay) * g(x0, y0) + ax * (1 - ay) * g(x0 + 1, y0) +
                (1 - ax) * ay * g(x0, y0 + 1) + ax * ay * g(x0 + 1, y0 + 1);
        }
    }
    return out;
}

struct OutdoorScene {
    RgbImage clean;
    RealGrid transmission;
};

/// Outdoor-like scene: a sky band on top at maximum depth, textured ground below
/// with luminance-correlated colour and one dark shadow pixel per 4x4 block (so
/// clean patches have a near-zero channel). Transmission ramps from t_far in the
/// sky to t_near at the bottom row.
inline OutdoorScene outdoor_scene(int w, int h, Rng& rng, double t_far, double t_near) {
    const int sky = h / 5;
    const auto lum = value_noise(w, h, 8, rng, 0.0, 255.0);
    std::array<std::vector<double>, 3> chroma;
    for (auto& c : chroma) c = value_noise(w, h, 8, rng, -20.0, 20.0);
    const std::array<double, 3> sky_rgb = {210.0, 222.0, 238.0};

    OutdoorScene scene{RgbImage(w, h), RealGrid(w, h)};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            Rgb p;
            for (int c = 0; c < 3; ++c) {
                p[c] = y < sky ? quantize(sky_rgb[c] + chroma[c][i] / 2.0)
                               : quantize(lum[i] + chroma[c][i]);
            }
            scene.clean.set(x, y, p);
            scene.transmission.at(x, y) =
                y < sky ? t_far
                        : t_far + (t_near - t_far) * (y - sky) / static_cast<double>(h - 1 - sky);
        }
    }
    for (int by = sky; by + 4 <= h; by += 4) {
        for (int bx = 0; bx + 4 <= w; bx += 4) {
            const int x = bx + static_cast<int>(rng.below(4));
            const int y = by + static_cast<int>(rng.below(4));
            Rgb p = scene.clean.at(x, y);
            p[rng.below(3)] = static_cast<Level>(rng.below(10));
            scene.clean.set(x, y, p);
        }
    }
    return scene;
}

/// Paired instance with gray airlight and A_b > I_b > J_b strictly at every pixel.
struct StrictInstance {
    RgbImage clean;
    RgbImage hazy;
    AtmosphericLight airlight;
    RealGrid transmission;
};

inline StrictInstance strict_instance(int w, int h, Rng& rng) {
    const int a = 200 + static_cast<int>(rng.below(56));
    StrictInstance inst{RgbImage(w, h), RgbImage(w, h), {{static_cast<Level>(a),
                        static_cast<Level>(a), static_cast<Level>(a)}}, RealGrid(w, h)};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const auto g = static_cast<Level>(rng.below(static_cast<std::uint64_t>(a - 40)));
            inst.clean.set(x, y, {g, static_cast<Level>(g * 0.8), static_cast<Level>(g * 0.6)});
        }
    }
    const double t_top = rng.uniform(0.5, 0.8);
    const double t_bottom = rng.uniform(0.2, 0.5);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            inst.transmission.at(x, y) = t_top + (t_bottom - t_top) * y / static_cast<double>(h - 1);
        }
    }
    inst.hazy = synthesize_hazy(inst.clean, {inst.airlight.rgb, inst.transmission});
    return inst;
}

/// The same scene re-hazed with transmission scaled by `scale` (clamped to [0, 1]).
inline DensityHistogram rehazed_density(const StrictInstance& inst, double scale) {
    RealGrid t = inst.transmission;
    for (auto& v : t.values) v = std::clamp(v * scale, 0.0, 1.0);
    return estimate_density(to_brightness(synthesize_hazy(inst.clean, {inst.airlight.rgb, t})));
}

}  // namespace hazemix::fixture
