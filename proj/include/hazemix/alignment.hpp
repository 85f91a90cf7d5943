#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hazemix/airlight.hpp"
#include "hazemix/density.hpp"
#include "hazemix/image.hpp"

namespace hazemix {

/// Strict pixel order for exact histogram specification: brightness first,
/// then local means over growing windows, then raster index.
struct PixelRanking {
    int width = 0;
    int height = 0;
    std::vector<std::uint32_t> order;  ///< pixel indices, lowest rank first
    int key_depth = 0;
};

inline constexpr std::array<int, 5> kRankingWindows = {3, 5, 7, 9, 11};

PixelRanking rank_pixels(const BrightnessImage& b);

/// Integer pixel counts per level summing to `total`, by largest remainder.
/// Remainder ties go to the lower level.
std::array<std::uint64_t, kLevels> apportion_counts(const DensityHistogram& target,
                                                    std::uint64_t total);

/// Prototype I_p: the image whose histogram is exactly the apportioned
/// target, assigned along the ranking.
BrightnessImage build_prototype(const BrightnessImage& b, const PixelRanking& ranking,
                                const DensityHistogram& target);

/// Per-pixel weights toward the clean image (alpha) and the airlight (beta).
struct MixWeights {
    RealGrid alpha;
    RealGrid beta;

    MixWeights() = default;
    MixWeights(int width, int height) : alpha(width, height), beta(width, height) {}

    int width() const { return alpha.width; }
    int height() const { return alpha.height; }
};

/// True when 0 <= alpha, beta, alpha + beta <= 1 and alpha * beta = 0 everywhere.
bool is_feasible(const MixWeights& w, double tolerance = 1e-12);

MixWeights solve_mix_weights(const BrightnessImage& hazy_b, const BrightnessImage& clean_b,
                             Level airlight_b, const BrightnessImage& prototype);

/// I_hat = (1 - alpha - beta) I + alpha J + beta A, per channel, rounded.
RgbImage compose_damix(const RgbImage& hazy, const RgbImage& clean, const AtmosphericLight& a,
                       const MixWeights& w);

struct DamixSample {
    RgbImage image;
    MixWeights weights;
    DensityHistogram achieved_density;
    DensityHistogram target_density;
    double residual_distance = 0.0;
    double initial_distance = 0.0;  ///< W_p(density(I), target) before mixing
    bool fell_back = false;         ///< alignment would have increased W_p; I returned unchanged
};

struct DamixOptions {
    double p = 1.0;
    int grid_size = kDefaultQuantileGrid;
};

DamixSample damix(const RgbImage& hazy, const RgbImage& clean, const AtmosphericLight& a,
                  const DensityHistogram& target, const DamixOptions& options = {});

enum class MixMode { Thinner, Thicker };

RgbImage scalar_mixup(const RgbImage& hazy, const RgbImage& clean, const AtmosphericLight& a,
                      double lambda, MixMode mode);

struct ScalarMix {
    RgbImage image;
    double lambda;
    MixMode mode;
};

/// Ablation path: one global lambda chosen so that the mean brightness moves
/// toward target_mean.
ScalarMix scalar_damix(const RgbImage& hazy, const RgbImage& clean, const AtmosphericLight& a,
                       double target_mean);

}  // namespace hazemix
