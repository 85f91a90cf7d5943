#include "hazemix/reference_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hazemix/errors.hpp"

namespace hazemix {

namespace {

// Index of the empirical quantile at u_k = (k + 0.5) / m for n sorted samples:
// ceil(u_k * n) - 1, in exact integer arithmetic.
std::size_t sample_index(std::size_t k, std::size_t n, std::size_t m) {
    const std::size_t num = (2 * k + 1) * n;
    return (num + 2 * m - 1) / (2 * m) - 1;
}

struct Evaluation {
    double objective;
    std::vector<double> grad_v;  // d objective / d v(x)
};

Evaluation evaluate(std::span<const double> v, const QuantileFunction& target) {
    const std::size_t n = v.size();
    const std::size_t m = target.grid_size();
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return v[a] < v[b]; });
    Evaluation e{0.0, std::vector<double>(n, 0.0)};
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < m; ++k) {
        const std::uint32_t px = order[sample_index(k, n, m)];
        const double diff = v[px] - target[k];
        e.objective += std::abs(diff);
        if (diff > 0.0) {
            e.grad_v[px] += inv_m;
        } else if (diff < 0.0) {
            e.grad_v[px] -= inv_m;
        }
    }
    e.objective *= inv_m;
    return e;
}

// Replaces a pair with both weights positive by the single weight that yields
// the same mixed brightness, restoring alpha * beta = 0.
void collapse_pair(double& alpha, double& beta, double ib, double jb, double ab) {
    if (alpha <= 0.0 || beta <= 0.0) return;
    const double shift = alpha * (jb - ib) + beta * (ab - ib);
    alpha = 0.0;
    beta = 0.0;
    if (shift < 0.0 && jb < ib) {
        alpha = std::min(shift / (jb - ib), 1.0);
    } else if (shift > 0.0 && ab > ib) {
        beta = std::min(shift / (ab - ib), 1.0);
    }
}

}  // namespace

RealGrid mixed_brightness(const BrightnessImage& hazy_b, const BrightnessImage& clean_b,
                          Level airlight_b, const MixWeights& w) {
    RealGrid v(hazy_b.width(), hazy_b.height());
    const auto I = hazy_b.data();
    const auto J = clean_b.data();
    for (std::size_t i = 0; i < v.values.size(); ++i) {
        const double a = w.alpha.values[i];
        const double b = w.beta.values[i];
        v.values[i] = (1.0 - a - b) * I[i] + a * J[i] + b * airlight_b;
    }
    return v;
}

double empirical_wasserstein1(std::span<const double> samples, const QuantileFunction& target) {
    if (samples.empty()) throw ValidationError("empirical_wasserstein1: no samples");
    return evaluate(samples, target).objective;
}

double quantized_objective(const BrightnessImage& hazy_b, const BrightnessImage& clean_b,
                           Level airlight_b, const MixWeights& w, const DensityHistogram& target,
                           int grid_size) {
    const auto v = mixed_brightness(hazy_b, clean_b, airlight_b, w);
    std::vector<Level> levels(v.values.size());
    std::transform(v.values.begin(), v.values.end(), levels.begin(),
                   [](double x) { return quantize(x); });
    const BrightnessImage img(hazy_b.width(), hazy_b.height(), std::move(levels));
    return wasserstein(estimate_density(img), target, 1.0, grid_size);
}

SolverResult pgd_solve(const BrightnessImage& hazy_b, const BrightnessImage& clean_b,
                       Level airlight_b, const DensityHistogram& target, const SolverConfig& cfg) {
    if (hazy_b.width() != clean_b.width() || hazy_b.height() != clean_b.height()) {
        throw ValidationError("pgd_solve: image sizes differ");
    }
    const std::size_t n = hazy_b.pixel_count();
    if (n > kMaxOraclePixels) {
        throw ValidationError("pgd_solve: reference solver is limited to 64x64 pixels");
    }
    if (cfg.p != 1.0) throw ValidationError("pgd_solve: only p = 1 is supported");
    if (cfg.max_iters < 1) throw ValidationError("pgd_solve: max_iters must be >= 1");
    if (cfg.step_size < 0.0 || !std::isfinite(cfg.step_size)) {
        throw ValidationError("pgd_solve: step size must be positive");
    }
    if (!(cfg.tolerance >= 0.0)) throw ValidationError("pgd_solve: tolerance must be >= 0");
    const auto I = hazy_b.data();
    const auto J = clean_b.data();
    if (*std::max_element(I.begin(), I.end()) > airlight_b) {
        throw ValidationError("pgd_solve: airlight brightness must be >= max hazy brightness");
    }

    const double step = cfg.step_size > 0.0 ? cfg.step_size : 50.0 / static_cast<double>(n);
    const auto target_q = to_quantile(target, cfg.grid_size);
    const double ab = airlight_b;

    MixWeights w(hazy_b.width(), hazy_b.height());
    auto v = mixed_brightness(hazy_b, clean_b, airlight_b, w);
    auto eval = evaluate(v.values, target_q);

    SolverResult result{w, eval.objective, eval.objective, 0};
    double previous = eval.objective;
    for (int iter = 1; iter <= cfg.max_iters && result.objective > 0.0; ++iter) {
        // Diminishing schedule; a constant subgradient step oscillates around the optimum.
        const double step_k = step / std::sqrt(static_cast<double>(iter));
        for (std::size_t i = 0; i < n; ++i) {
            const double g = eval.grad_v[i];
            if (g == 0.0) continue;
            double& a = w.alpha.values[i];
            double& b = w.beta.values[i];
            a -= step_k * g * (J[i] - static_cast<double>(I[i]));
            b -= step_k * g * (ab - I[i]);
            // Projection: clamp to the orthant, then scale the pair onto alpha + beta <= 1.
            a = std::max(a, 0.0);
            b = std::max(b, 0.0);
            const double sum = a + b;
            if (sum > 1.0) {
                a /= sum;
                b /= sum;
            }
            collapse_pair(a, b, I[i], J[i], ab);
        }
        v = mixed_brightness(hazy_b, clean_b, airlight_b, w);
        eval = evaluate(v.values, target_q);
        result.iterations = iter;
        if (eval.objective < result.objective) {
            result.objective = eval.objective;
            result.weights = w;
        }
        const double change = std::abs(previous - eval.objective);
        if (change <= cfg.tolerance * std::max(previous, 1e-300)) break;
        previous = eval.objective;
    }
    return result;
}

}  // namespace hazemix
