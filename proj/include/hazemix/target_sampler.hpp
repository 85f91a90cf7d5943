#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hazemix/density.hpp"
#include "hazemix/random.hpp"

namespace hazemix {

/// Haze densities of the K target-domain images, kept in quantile form.
class TargetDomain {
public:
    TargetDomain(std::vector<DensityHistogram> histograms, std::vector<std::string> source_ids,
                 int grid_size = kDefaultQuantileGrid);

    std::size_t size() const { return quantiles_.size(); }
    int grid_size() const { return grid_size_; }
    const std::vector<QuantileFunction>& quantiles() const { return quantiles_; }
    const std::vector<DensityHistogram>& histograms() const { return histograms_; }
    const std::vector<std::string>& source_ids() const { return source_ids_; }

private:
    std::vector<DensityHistogram> histograms_;
    std::vector<QuantileFunction> quantiles_;
    std::vector<std::string> source_ids_;
    int grid_size_;
};

/// Point on the probability simplex.
class SimplexWeights {
public:
    explicit SimplexWeights(std::vector<double> theta);

    std::size_t size() const { return theta_.size(); }
    const std::vector<double>& theta() const { return theta_; }
    double operator[](std::size_t i) const { return theta_[i]; }

    static SimplexWeights basis(std::size_t k, std::size_t i);

private:
    std::vector<double> theta_;
};

/// Ids default to "0", "1", ... when none are given.
TargetDomain build_target_domain(const std::vector<BrightnessImage>& images,
                                 std::vector<std::string> source_ids = {},
                                 int grid_size = kDefaultQuantileGrid);

/// Wasserstein interpolation: averages member quantile functions with weights
/// theta and rediscretizes to 256 bins.
QuantileFunction interpolate_quantile(const TargetDomain& domain, const SimplexWeights& w);
DensityHistogram interpolate_target(const TargetDomain& domain, const SimplexWeights& w);

/// Flat Dirichlet sample on the (K-1)-simplex.
SimplexWeights sample_theta(int k, Rng& rng);
SimplexWeights sample_theta(int k, std::uint64_t seed);

/// Flat Dirichlet over a uniformly chosen subset of `subset` members; all
/// other weights are zero. subset >= k degenerates to sample_theta.
SimplexWeights sample_theta_subset(int k, int subset, Rng& rng);

/// Randomized density target for domain generalization. Control points are
/// k sorted uniform draws in [0, 255] placed at equally spaced quantile
/// anchors and linearly interpolated over the grid.
struct RandomTarget {
    std::vector<double> control_points;
    DensityHistogram histogram;
};

RandomTarget random_target(std::uint64_t seed, int control_points,
                           int grid_size = kDefaultQuantileGrid);
RandomTarget random_target(Rng& rng, int control_points, int grid_size = kDefaultQuantileGrid);

/// Deterministic rebuild from recorded control points (must be sorted).
QuantileFunction quantile_from_control_points(const std::vector<double>& control_points,
                                              int grid_size = kDefaultQuantileGrid);

/// Persists the domain as a directory: one histogram sidecar per member plus
/// manifest.json listing source ids and grid size.
void save_target_domain(const TargetDomain& domain, const std::filesystem::path& dir);
TargetDomain load_target_domain(const std::filesystem::path& dir);

}  // namespace hazemix
