#include "hazemix/target_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include <json.hpp>

#include "hazemix/errors.hpp"
#include "hazemix/sidecar.hpp"

namespace hazemix {

namespace fs = std::filesystem;

TargetDomain::TargetDomain(std::vector<DensityHistogram> histograms,
                           std::vector<std::string> source_ids, int grid_size)
    : histograms_(std::move(histograms)), source_ids_(std::move(source_ids)),
      grid_size_(grid_size) {
    if (histograms_.empty()) throw ValidationError("target domain needs at least one image");
    if (source_ids_.empty()) {
        for (std::size_t i = 0; i < histograms_.size(); ++i) {
            source_ids_.push_back(std::to_string(i));
        }
    }
    if (source_ids_.size() != histograms_.size()) {
        throw ValidationError("target domain ids and histograms differ in count");
    }
    quantiles_.reserve(histograms_.size());
    for (const auto& h : histograms_) quantiles_.push_back(to_quantile(h, grid_size_));
}

SimplexWeights::SimplexWeights(std::vector<double> theta) : theta_(std::move(theta)) {
    if (theta_.empty()) throw ValidationError("simplex weights must be nonempty");
    double sum = 0.0;
    for (double t : theta_) {
        if (!(t >= 0.0)) throw ValidationError("simplex weights must be nonnegative");
        sum += t;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("simplex weights must sum to 1");
}

SimplexWeights SimplexWeights::basis(std::size_t k, std::size_t i) {
    std::vector<double> theta(k, 0.0);
    theta.at(i) = 1.0;
    return SimplexWeights(std::move(theta));
}

TargetDomain build_target_domain(const std::vector<BrightnessImage>& images,
                                 std::vector<std::string> source_ids, int grid_size) {
    if (images.empty()) throw ValidationError("target domain needs at least one image");
    std::vector<DensityHistogram> hists;
    hists.reserve(images.size());
    for (const auto& img : images) hists.push_back(estimate_density(img));
    return TargetDomain(std::move(hists), std::move(source_ids), grid_size);
}

QuantileFunction interpolate_quantile(const TargetDomain& domain, const SimplexWeights& w) {
    if (w.size() != domain.size()) {
        throw ValidationError("simplex weights size does not match the target domain");
    }
    const auto m = static_cast<std::size_t>(domain.grid_size());
    std::vector<double> values(m, 0.0);
    for (std::size_t i = 0; i < domain.size(); ++i) {
        const double theta = w[i];
        if (theta == 0.0) continue;
        const auto q = domain.quantiles()[i].values();
        for (std::size_t k = 0; k < m; ++k) values[k] += theta * q[k];
    }
    // Weights sum to 1 only up to rounding; keep the grid inside [0, 255] and monotone.
    for (std::size_t k = 0; k < m; ++k) {
        values[k] = std::clamp(values[k], 0.0, 255.0);
        if (k > 0) values[k] = std::max(values[k], values[k - 1]);
    }
    return QuantileFunction(std::move(values));
}

DensityHistogram interpolate_target(const TargetDomain& domain, const SimplexWeights& w) {
    return to_histogram(interpolate_quantile(domain, w));
}

SimplexWeights sample_theta(int k, Rng& rng) {
    if (k < 1) throw ValidationError("sample_theta needs K >= 1");
    std::vector<double> g(static_cast<std::size_t>(k));
    double sum = 0.0;
    for (auto& x : g) {
        x = rng.exponential();
        sum += x;
    }
    if (!(sum > 0.0)) {
        // All draws were exactly zero, which has probability zero; fall back to uniform.
        std::fill(g.begin(), g.end(), 1.0);
        sum = k;
    }
    for (auto& x : g) x /= sum;
    return SimplexWeights(std::move(g));
}

SimplexWeights sample_theta(int k, std::uint64_t seed) {
    Rng rng(seed);
    return sample_theta(k, rng);
}

SimplexWeights sample_theta_subset(int k, int subset, Rng& rng) {
    if (k < 1) throw ValidationError("sample_theta needs K >= 1");
    if (subset < 1) throw ValidationError("subset size must be >= 1");
    if (subset >= k) return sample_theta(k, rng);
    // Partial Fisher-Yates for a uniform k-subset.
    std::vector<std::size_t> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < subset; ++i) {
        const auto j = static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(k - i));
        std::swap(idx[i], idx[j]);
    }
    std::vector<std::size_t> chosen(idx.begin(), idx.begin() + subset);
    std::sort(chosen.begin(), chosen.end());
    const auto inner = sample_theta(subset, rng);
    std::vector<double> theta(static_cast<std::size_t>(k), 0.0);
    for (int i = 0; i < subset; ++i) theta[chosen[i]] = inner[i];
    return SimplexWeights(std::move(theta));
}

QuantileFunction quantile_from_control_points(const std::vector<double>& control_points,
                                              int grid_size) {
    if (control_points.size() < 2) throw ValidationError("need at least 2 control points");
    if (grid_size < 1) throw ValidationError("quantile grid size must be >= 1");
    if (!std::is_sorted(control_points.begin(), control_points.end())) {
        throw ValidationError("control points must be sorted ascending");
    }
    const std::size_t segments = control_points.size() - 1;
    std::vector<double> values(static_cast<std::size_t>(grid_size));
    for (int k = 0; k < grid_size; ++k) {
        // Anchors sit at u = j / (count - 1).
        const double pos = (k + 0.5) / grid_size * static_cast<double>(segments);
        const auto j = std::min(static_cast<std::size_t>(pos), segments - 1);
        const double frac = pos - static_cast<double>(j);
        const double a = control_points[j];
        const double b = control_points[j + 1];
        values[k] = std::clamp(a + (b - a) * frac, a, b);
    }
    return QuantileFunction(std::move(values));
}

RandomTarget random_target(Rng& rng, int control_points, int grid_size) {
    if (control_points < 2) throw ValidationError("random_target needs k >= 2 control points");
    std::vector<double> points(static_cast<std::size_t>(control_points));
    for (auto& p : points) p = rng.uniform(0.0, 255.0);
    std::sort(points.begin(), points.end());
    auto hist = to_histogram(quantile_from_control_points(points, grid_size));
    return {std::move(points), std::move(hist)};
}

RandomTarget random_target(std::uint64_t seed, int control_points, int grid_size) {
    Rng rng(seed);
    return random_target(rng, control_points, grid_size);
}

void save_target_domain(const TargetDomain& domain, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create '" + dir.string() + "'");
    nlohmann::json manifest;
    manifest["version"] = kSidecarVersion;
    manifest["grid_size"] = domain.grid_size();
    manifest["members"] = nlohmann::json::array();
    for (std::size_t i = 0; i < domain.size(); ++i) {
        const std::string file = "member_" + std::to_string(i) + ".density.json";
        write_histogram_sidecar(domain.histograms()[i], dir / file);
        manifest["members"].push_back({{"source_id", domain.source_ids()[i]}, {"sidecar", file}});
    }
    write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

TargetDomain load_target_domain(const fs::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw IoError("cannot open '" + (dir / "manifest.json").string() + "'");
    try {
        const auto manifest = nlohmann::json::parse(in);
        if (manifest.at("version").get<int>() != kSidecarVersion) {
            throw ValidationError("unsupported target domain manifest version");
        }
        std::vector<DensityHistogram> hists;
        std::vector<std::string> ids;
        for (const auto& m : manifest.at("members")) {
            ids.push_back(m.at("source_id").get<std::string>());
            hists.push_back(read_histogram_sidecar(dir / m.at("sidecar").get<std::string>()));
        }
        return TargetDomain(std::move(hists), std::move(ids), manifest.at("grid_size").get<int>());
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed target domain manifest: ") + e.what());
    }
}

}  // namespace hazemix
