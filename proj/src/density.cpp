#include "hazemix/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hazemix/errors.hpp"

namespace hazemix {

DensityHistogram::DensityHistogram(const Bins& bins, std::uint64_t pixel_count)
    : bins_(bins), pixel_count_(pixel_count) {
    if (pixel_count == 0) throw ValidationError("histogram pixel_count must be positive");
    double sum = 0.0;
    for (double b : bins_) {
        if (!(b >= 0.0) || !std::isfinite(b)) {
            throw ValidationError("histogram bins must be finite and nonnegative");
        }
        sum += b;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ValidationError("histogram bins must sum to 1, got " + std::to_string(sum));
    }
}

DensityHistogram DensityHistogram::dirac(int level, std::uint64_t pixel_count) {
    if (level < 0 || level >= kLevels) throw ValidationError("level out of range");
    Bins bins{};
    bins[level] = 1.0;
    return DensityHistogram(bins, pixel_count);
}

QuantileFunction::QuantileFunction(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw ValidationError("quantile grid must be nonempty");
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!(values_[k] >= 0.0 && values_[k] <= 255.0)) {
            throw ValidationError("quantile values must lie in [0, 255]");
        }
        if (k > 0 && values_[k] < values_[k - 1]) {
            throw ValidationError("quantile values must be nondecreasing");
        }
    }
}

DensityHistogram estimate_density(const BrightnessImage& b) {
    const auto data = b.data();
    if (data.empty()) throw ValidationError("cannot estimate density of an empty image");
    std::array<std::uint64_t, kLevels> counts{};
    for (Level v : data) ++counts[v];
    DensityHistogram::Bins bins{};
    const double n = static_cast<double>(data.size());
    for (int v = 0; v < kLevels; ++v) bins[v] = static_cast<double>(counts[v]) / n;
    return DensityHistogram(bins, data.size());
}

QuantileFunction to_quantile(const DensityHistogram& h, int grid_size) {
    if (grid_size < 1) throw ValidationError("quantile grid size must be >= 1");
    std::array<double, kLevels> cdf{};
    std::partial_sum(h.bins().begin(), h.bins().end(), cdf.begin());
    int last_support = kLevels - 1;
    while (last_support > 0 && h[last_support] == 0.0) --last_support;

    std::vector<double> values(static_cast<std::size_t>(grid_size));
    const double m = grid_size;
    int level = 0;
    for (int k = 0; k < grid_size; ++k) {
        const double u = (k + 0.5) / m;
        // u increases with k, so the scan resumes where the previous one stopped.
        while (level < last_support && cdf[level] < u) ++level;
        values[k] = level;
    }
    return QuantileFunction(std::move(values));
}

DensityHistogram to_histogram(const QuantileFunction& q) {
    std::array<std::uint64_t, kLevels> counts{};
    for (double v : q.values()) ++counts[static_cast<int>(std::lround(v))];
    DensityHistogram::Bins bins{};
    const double m = static_cast<double>(q.grid_size());
    for (int v = 0; v < kLevels; ++v) bins[v] = static_cast<double>(counts[v]) / m;
    return DensityHistogram(bins, q.grid_size());
}

double wasserstein(const QuantileFunction& a, const QuantileFunction& b, double p) {
    if (!(p >= 1.0)) throw ValidationError("Wasserstein order p must be >= 1");
    if (a.grid_size() != b.grid_size()) {
        throw ValidationError("quantile functions must share a grid size");
    }
    const auto va = a.values();
    const auto vb = b.values();
    double acc = 0.0;
    if (p == 1.0) {
        for (std::size_t k = 0; k < va.size(); ++k) acc += std::abs(va[k] - vb[k]);
        return acc / static_cast<double>(va.size());
    }
    // Normalizing by the largest gap keeps pow() exact when all gaps are equal.
    double scale = 0.0;
    for (std::size_t k = 0; k < va.size(); ++k) scale = std::max(scale, std::abs(va[k] - vb[k]));
    if (scale == 0.0) return 0.0;
    for (std::size_t k = 0; k < va.size(); ++k) acc += std::pow(std::abs(va[k] - vb[k]) / scale, p);
    return scale * std::pow(acc / static_cast<double>(va.size()), 1.0 / p);
}

double wasserstein(const DensityHistogram& a, const DensityHistogram& b, double p,
                   int grid_size) {
    if (!(p >= 1.0)) throw ValidationError("Wasserstein order p must be >= 1");
    return wasserstein(to_quantile(a, grid_size), to_quantile(b, grid_size), p);
}

double scalar_density(const BrightnessImage& b) {
    const auto data = b.data();
    if (data.empty()) throw ValidationError("cannot average an empty image");
    std::uint64_t sum = 0;
    for (Level v : data) sum += v;
    return static_cast<double>(sum) / static_cast<double>(data.size());
}

double histogram_mean(const DensityHistogram& h) {
    double mean = 0.0;
    for (int v = 0; v < kLevels; ++v) mean += v * h[v];
    return mean;
}

}  // namespace hazemix
