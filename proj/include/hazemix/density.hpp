#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "hazemix/image.hpp"

namespace hazemix {

inline constexpr int kDefaultQuantileGrid = 4096;

/// Haze density: a probability measure over the 256 brightness levels.
class DensityHistogram {
public:
    using Bins = std::array<double, kLevels>;

    /// Validates that bins are nonnegative and sum to one within 1e-9.
    DensityHistogram(const Bins& bins, std::uint64_t pixel_count);

    static DensityHistogram dirac(int level, std::uint64_t pixel_count = 1);

    const Bins& bins() const { return bins_; }
    double operator[](int level) const { return bins_[level]; }
    std::uint64_t pixel_count() const { return pixel_count_; }

    bool operator==(const DensityHistogram&) const = default;

private:
    Bins bins_;
    std::uint64_t pixel_count_;
};

/// Generalized inverse CDF sampled at grid midpoints u_k = (k + 0.5) / m.
class QuantileFunction {
public:
    explicit QuantileFunction(std::vector<double> values);

    std::size_t grid_size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t k) const { return values_[k]; }

    bool operator==(const QuantileFunction&) const = default;

private:
    std::vector<double> values_;
};

DensityHistogram estimate_density(const BrightnessImage& b);

QuantileFunction to_quantile(const DensityHistogram& h, int grid_size = kDefaultQuantileGrid);

/// Rediscretizes a quantile grid to 256 bins: each grid value is rounded to
/// the nearest level and contributes 1/m mass there.
DensityHistogram to_histogram(const QuantileFunction& q);

/// 1D p-Wasserstein distance via quantile functions on a shared grid.
double wasserstein(const QuantileFunction& a, const QuantileFunction& b, double p = 1.0);
double wasserstein(const DensityHistogram& a, const DensityHistogram& b, double p = 1.0,
                   int grid_size = kDefaultQuantileGrid);

/// Mean brightness (the scalar density used by the ablation path).
double scalar_density(const BrightnessImage& b);

/// First moment of a histogram.
double histogram_mean(const DensityHistogram& h);

}  // namespace hazemix
