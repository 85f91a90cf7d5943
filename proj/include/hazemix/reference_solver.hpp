#pragma once

#include "hazemix/alignment.hpp"
#include "hazemix/density.hpp"
#include "hazemix/image.hpp"

namespace hazemix {

inline constexpr std::size_t kMaxOraclePixels = 64 * 64;

struct SolverConfig {
    double step_size = 0.0;  ///< 0 selects 50 / |Omega|
    int max_iters = 500;
    double p = 1.0;          ///< only 1 is supported
    double tolerance = 1e-6; ///< relative objective change
    int grid_size = kDefaultQuantileGrid;
};

struct SolverResult {
    MixWeights weights;
    double objective = 0.0;  ///< best continuous W_1 reached
    double initial_objective = 0.0;
    int iterations = 0;
};

/// Projected subgradient descent on W_1(density of v, target) where
/// v = (1 - alpha - beta) I_b + alpha J_b + beta A_b, over real-valued v.
/// Slow; intended as a reference for the closed-form alignment.
SolverResult pgd_solve(const BrightnessImage& hazy_b, const BrightnessImage& clean_b,
                       Level airlight_b, const DensityHistogram& target,
                       const SolverConfig& cfg = {});

/// v for given weights, unquantized.
RealGrid mixed_brightness(const BrightnessImage& hazy_b, const BrightnessImage& clean_b,
                          Level airlight_b, const MixWeights& w);

/// W_1 between the empirical measure of real samples and a target quantile grid.
double empirical_wasserstein1(std::span<const double> samples, const QuantileFunction& target);

/// Objective after rounding v to integer levels, the scale the fast path works on.
double quantized_objective(const BrightnessImage& hazy_b, const BrightnessImage& clean_b,
                           Level airlight_b, const MixWeights& w, const DensityHistogram& target,
                           int grid_size = kDefaultQuantileGrid);

}  // namespace hazemix
