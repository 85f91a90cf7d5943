#include "hazemix/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hazemix/errors.hpp"

namespace hazemix {

namespace {

constexpr int kMaxRadius = kRankingWindows.back() / 2;
constexpr int kKeyDepth = 1 + static_cast<int>(kRankingWindows.size());

using RankKey = std::array<std::uint32_t, kKeyDepth>;

// Window sums with edge replication, one integral image over the padded frame.
std::vector<RankKey> ranking_keys(const BrightnessImage& b) {
    const int w = b.width();
    const int h = b.height();
    const int pw = w + 2 * kMaxRadius;
    const int ph = h + 2 * kMaxRadius;
    std::vector<std::uint64_t> integral(static_cast<std::size_t>(pw + 1) * (ph + 1), 0);
    auto I = [&](int x, int y) -> std::uint64_t& {
        return integral[static_cast<std::size_t>(y) * (pw + 1) + x];
    };
    for (int y = 0; y < ph; ++y) {
        const int sy = std::clamp(y - kMaxRadius, 0, h - 1);
        std::uint64_t row = 0;
        for (int x = 0; x < pw; ++x) {
            const int sx = std::clamp(x - kMaxRadius, 0, w - 1);
            row += b.at(sx, sy);
            I(x + 1, y + 1) = I(x + 1, y) + row;
        }
    }

    std::vector<RankKey> keys(b.pixel_count());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            auto& key = keys[static_cast<std::size_t>(y) * w + x];
            key[0] = b.at(x, y);
            // Windows have a fixed area per level, so sums order exactly like means.
            for (std::size_t k = 0; k < kRankingWindows.size(); ++k) {
                const int r = kRankingWindows[k] / 2;
                const int x0 = x + kMaxRadius - r;
                const int y0 = y + kMaxRadius - r;
                const int x1 = x + kMaxRadius + r + 1;
                const int y1 = y + kMaxRadius + r + 1;
                key[k + 1] =
                    static_cast<std::uint32_t>(I(x1, y1) - I(x0, y1) - I(x1, y0) + I(x0, y0));
            }
        }
    }
    return keys;
}

void check_same_size(const BrightnessImage& a, const BrightnessImage& b, const char* what) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw ValidationError(std::string(what) + ": image sizes differ");
    }
}

}  // namespace

PixelRanking rank_pixels(const BrightnessImage& b) {
    const auto keys = ranking_keys(b);
    PixelRanking ranking{b.width(), b.height(), std::vector<std::uint32_t>(b.pixel_count()),
                         kKeyDepth};
    std::iota(ranking.order.begin(), ranking.order.end(), 0u);
    std::sort(ranking.order.begin(), ranking.order.end(), [&](std::uint32_t a, std::uint32_t c) {
        if (keys[a] != keys[c]) return keys[a] < keys[c];
        return a < c;
    });
    return ranking;
}

std::array<std::uint64_t, kLevels> apportion_counts(const DensityHistogram& target,
                                                    std::uint64_t total) {
    std::array<std::uint64_t, kLevels> counts{};
    std::array<double, kLevels> remainder{};
    std::uint64_t assigned = 0;
    for (int v = 0; v < kLevels; ++v) {
        const double exact = target[v] * static_cast<double>(total);
        const double whole = std::floor(exact);
        counts[v] = static_cast<std::uint64_t>(whole);
        remainder[v] = exact - whole;
        assigned += counts[v];
    }
    std::array<int, kLevels> levels{};
    std::iota(levels.begin(), levels.end(), 0);
    if (assigned < total) {
        // Largest remainders first, lower level on ties.
        std::stable_sort(levels.begin(), levels.end(),
                         [&](int a, int b) { return remainder[a] > remainder[b]; });
        for (std::size_t i = 0; assigned < total; i = (i + 1) % levels.size()) {
            if (target[levels[i]] > 0.0) {
                ++counts[levels[i]];
                ++assigned;
            }
        }
    } else if (assigned > total) {
        // Only reachable when the bins overshoot 1 by rounding: trim the smallest remainders.
        std::stable_sort(levels.begin(), levels.end(),
                         [&](int a, int b) { return remainder[a] < remainder[b]; });
        for (std::size_t i = 0; assigned > total; i = (i + 1) % levels.size()) {
            if (counts[levels[i]] > 0) {
                --counts[levels[i]];
                --assigned;
            }
        }
    }
    return counts;
}

BrightnessImage build_prototype(const BrightnessImage& b, const PixelRanking& ranking,
                                const DensityHistogram& target) {
    if (ranking.width != b.width() || ranking.height != b.height() ||
        ranking.order.size() != b.pixel_count()) {
        throw ValidationError("build_prototype: ranking does not match the image size");
    }
    const auto counts = apportion_counts(target, b.pixel_count());
    BrightnessImage out(b.width(), b.height());
    auto dst = out.data();
    std::size_t pos = 0;
    for (int v = 0; v < kLevels; ++v) {
        for (std::uint64_t c = 0; c < counts[v]; ++c) {
            dst[ranking.order[pos++]] = static_cast<Level>(v);
        }
    }
    return out;
}

bool is_feasible(const MixWeights& w, double tolerance) {
    if (w.alpha.values.size() != w.beta.values.size()) return false;
    for (std::size_t i = 0; i < w.alpha.values.size(); ++i) {
        const double a = w.alpha.values[i];
        const double b = w.beta.values[i];
        if (!(a >= -tolerance && b >= -tolerance)) return false;
        if (a + b > 1.0 + tolerance) return false;
        if (std::abs(a * b) > tolerance) return false;
    }
    return true;
}

MixWeights solve_mix_weights(const BrightnessImage& hazy_b, const BrightnessImage& clean_b,
                             Level airlight_b, const BrightnessImage& prototype) {
    check_same_size(hazy_b, clean_b, "solve_mix_weights");
    check_same_size(hazy_b, prototype, "solve_mix_weights");
    MixWeights w(hazy_b.width(), hazy_b.height());
    const auto I = hazy_b.data();
    const auto J = clean_b.data();
    const auto P = prototype.data();
    const int A = airlight_b;
    for (std::size_t i = 0; i < I.size(); ++i) {
        const int ib = I[i];
        const int jb = J[i];
        const int ip = P[i];
        if (ib >= ip) {
            // Thinner: move toward J. A pixel already at or below J_b cannot darken.
            w.alpha.values[i] =
                ib > jb ? std::min(static_cast<double>(ib - ip) / (ib - jb), 1.0) : 0.0;
        } else {
            w.beta.values[i] = A > ib ? std::min(static_cast<double>(ip - ib) / (A - ib), 1.0) : 0.0;
        }
    }
    return w;
}

RgbImage compose_damix(const RgbImage& hazy, const RgbImage& clean, const AtmosphericLight& a,
                       const MixWeights& w) {
    if (hazy.width() != clean.width() || hazy.height() != clean.height() ||
        w.width() != hazy.width() || w.height() != hazy.height()) {
        throw ValidationError("compose_damix: image and weight sizes differ");
    }
    if (!is_feasible(w, 1e-9)) {
        throw ValidationError("compose_damix: weights violate 0 <= alpha, beta; alpha + beta <= 1; "
                              "alpha * beta = 0");
    }
    RgbImage out(hazy.width(), hazy.height());
    const auto I = hazy.data();
    const auto J = clean.data();
    auto O = out.data();
    for (std::size_t i = 0; i < hazy.pixel_count(); ++i) {
        const double al = w.alpha.values[i];
        const double be = w.beta.values[i];
        const double keep = 1.0 - al - be;
        for (int c = 0; c < 3; ++c) {
            const std::size_t k = 3 * i + c;
            O[k] = quantize(keep * I[k] + al * J[k] + be * a.rgb[c]);
        }
    }
    return out;
}

DamixSample damix(const RgbImage& hazy, const RgbImage& clean, const AtmosphericLight& a,
                  const DensityHistogram& target, const DamixOptions& options) {
    if (hazy.width() != clean.width() || hazy.height() != clean.height()) {
        throw ValidationError("damix: hazy and clean images differ in size");
    }
    const auto hazy_b = to_brightness(hazy);
    const auto clean_b = to_brightness(clean);
    const auto ranking = rank_pixels(hazy_b);
    const auto prototype = build_prototype(hazy_b, ranking, target);
    auto weights = solve_mix_weights(hazy_b, clean_b, a.brightness(), prototype);
    auto image = compose_damix(hazy, clean, a, weights);

    const auto target_q = to_quantile(target, options.grid_size);
    const auto initial_density = estimate_density(hazy_b);
    const double initial =
        wasserstein(to_quantile(initial_density, options.grid_size), target_q, options.p);
    auto achieved = estimate_density(to_brightness(image));
    double residual = wasserstein(to_quantile(achieved, options.grid_size), target_q, options.p);

    bool fell_back = false;
    // max(R,G,B) is not linear in the mix, so channel-argmax changes between I, J and A
    // can push the result away from the prototype; never return something worse than I.
    if (residual > initial) {
        weights = MixWeights(hazy.width(), hazy.height());
        image = hazy;
        achieved = initial_density;
        residual = initial;
        fell_back = true;
    }
    return DamixSample{std::move(image), std::move(weights), std::move(achieved), target,
                       residual, initial, fell_back};
}

RgbImage scalar_mixup(const RgbImage& hazy, const RgbImage& clean, const AtmosphericLight& a,
                      double lambda, MixMode mode) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw ValidationError("scalar_mixup: lambda must lie in [0, 1]");
    }
    if (hazy.width() != clean.width() || hazy.height() != clean.height()) {
        throw ValidationError("scalar_mixup: hazy and clean images differ in size");
    }
    RgbImage out(hazy.width(), hazy.height());
    const auto I = hazy.data();
    const auto J = clean.data();
    auto O = out.data();
    for (std::size_t i = 0; i < hazy.pixel_count(); ++i) {
        for (int c = 0; c < 3; ++c) {
            const std::size_t k = 3 * i + c;
            const double other = mode == MixMode::Thinner ? J[k] : a.rgb[c];
            O[k] = quantize(lambda * I[k] + (1.0 - lambda) * other);
        }
    }
    return out;
}

ScalarMix scalar_damix(const RgbImage& hazy, const RgbImage& clean, const AtmosphericLight& a,
                       double target_mean) {
    if (!(target_mean >= 0.0 && target_mean <= 255.0)) {
        throw ValidationError("scalar_damix: target mean must lie in [0, 255]");
    }
    const double mean_i = scalar_density(to_brightness(hazy));
    const double mean_j = scalar_density(to_brightness(clean));
    const double ab = a.brightness();
    double lambda = 1.0;
    MixMode mode;
    if (target_mean < mean_i) {
        mode = MixMode::Thinner;
        if (mean_i != mean_j) {
            lambda = std::clamp((target_mean - mean_j) / (mean_i - mean_j), 0.0, 1.0);
        }
    } else {
        mode = MixMode::Thicker;
        if (ab != mean_i) lambda = std::clamp((ab - target_mean) / (ab - mean_i), 0.0, 1.0);
    }
    return {scalar_mixup(hazy, clean, a, lambda, mode), lambda, mode};
}

}  // namespace hazemix
