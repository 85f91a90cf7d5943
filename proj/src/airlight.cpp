#include "hazemix/airlight.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "hazemix/errors.hpp"

namespace hazemix {

namespace {

// Sliding minimum along one axis with the window clamped to [0, n).
void min_filter_1d(const Level* src, Level* dst, int n, std::ptrdiff_t stride, int radius) {
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - radius);
        const int hi = std::min(n - 1, i + radius);
        Level m = 255;
        for (int j = lo; j <= hi; ++j) m = std::min(m, src[j * stride]);
        dst[i * stride] = m;
    }
}

}  // namespace

BrightnessImage dark_channel(const RgbImage& img, int patch) {
    if (patch < 1 || patch % 2 == 0) {
        throw ValidationError("dark channel patch must be a positive odd size, got " +
                              std::to_string(patch));
    }
    const int w = img.width();
    const int h = img.height();
    const int radius = patch / 2;
    std::vector<Level> channel_min(img.pixel_count());
    const auto src = img.data();
    for (std::size_t i = 0; i < channel_min.size(); ++i) {
        channel_min[i] = std::min({src[3 * i], src[3 * i + 1], src[3 * i + 2]});
    }
    // The window minimum is separable: rows first, then columns.
    std::vector<Level> rows(channel_min.size());
    for (int y = 0; y < h; ++y) {
        const std::size_t off = static_cast<std::size_t>(y) * w;
        min_filter_1d(channel_min.data() + off, rows.data() + off, w, 1, radius);
    }
    std::vector<Level> out(channel_min.size());
    for (int x = 0; x < w; ++x) {
        min_filter_1d(rows.data() + x, out.data() + x, h, w, radius);
    }
    return BrightnessImage(w, h, std::move(out));
}

AtmosphericLight enforce_feasible(AtmosphericLight light, Level max_brightness) {
    const int current = light.brightness();
    if (current >= max_brightness) return light;
    const int lift = max_brightness - current;
    for (auto& c : light.rgb) c = static_cast<Level>(c + lift);
    return light;
}

AirlightEstimate estimate_airlight_detailed(const RgbImage& hazy, int patch) {
    const auto dark = dark_channel(hazy, patch);
    const std::size_t n = hazy.pixel_count();
    const std::size_t top = std::max<std::size_t>(1, n / 1000);

    std::vector<std::uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    const auto d = dark.data();
    // Stable: equal dark values keep raster order.
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return d[a] > d[b]; });

    const auto src = hazy.data();
    std::array<std::uint64_t, 3> sums{};
    for (std::size_t k = 0; k < top; ++k) {
        for (int c = 0; c < 3; ++c) sums[c] += src[3 * static_cast<std::size_t>(idx[k]) + c];
    }
    AtmosphericLight raw;
    for (int c = 0; c < 3; ++c) {
        raw.rgb[c] = quantize(static_cast<double>(sums[c]) / static_cast<double>(top));
    }

    const auto b = to_brightness(hazy);
    const Level max_b = *std::max_element(b.data().begin(), b.data().end());
    return {raw, enforce_feasible(raw, max_b)};
}

AtmosphericLight estimate_airlight(const RgbImage& hazy, int patch) {
    return estimate_airlight_detailed(hazy, patch).enforced;
}

}  // namespace hazemix
