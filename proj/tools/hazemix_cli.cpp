// hazemix: density-aware mixup augmentation for paired dehazing data.
//
// Exit codes: 0 success, 2 I/O error, 3 validation error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "hazemix/airlight.hpp"
#include "hazemix/density.hpp"
#include "hazemix/errors.hpp"
#include "hazemix/image_io.hpp"
#include "hazemix/pipeline.hpp"
#include "hazemix/sidecar.hpp"

namespace fs = std::filesystem;
using namespace hazemix;

namespace {

constexpr int kExitIo = 2;
constexpr int kExitValidation = 3;

AtmosphericLight parse_rgb(const std::string& text) {
    std::istringstream in(text);
    AtmosphericLight light;
    for (int c = 0; c < 3; ++c) {
        int v = -1;
        if (!(in >> v) || v < 0 || v > 255) {
            throw ValidationError("airlight must be 'R,G,B' with values in 0..255, got '" + text + "'");
        }
        light.rgb[c] = static_cast<Level>(v);
        if (c < 2 && in.get() != ',') {
            throw ValidationError("airlight must be 'R,G,B', got '" + text + "'");
        }
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw ValidationError("trailing characters in airlight '" + text + "'");
    }
    return light;
}

std::string format_rgb(const Rgb& rgb) {
    return std::to_string(rgb[0]) + "," + std::to_string(rgb[1]) + "," + std::to_string(rgb[2]);
}

int cmd_density(const std::string& image, const std::string& json_out) {
    const auto h = estimate_density(to_brightness(load_image(image)));
    if (json_out.empty()) {
        std::cout << histogram_to_json(h).dump(2) << "\n";
    } else {
        write_histogram_sidecar(h, json_out);
    }
    return 0;
}

int cmd_airlight(const std::string& image, int patch) {
    const auto img = load_image(image);
    std::cout << format_rgb(estimate_airlight(img, patch).rgb) << "\n";
    return 0;
}

int cmd_distance(const std::string& a, const std::string& b, double p) {
    const auto ha = estimate_density(to_brightness(load_image(a)));
    const auto hb = estimate_density(to_brightness(load_image(b)));
    std::cout.precision(std::numeric_limits<double>::max_digits10);
    std::cout << wasserstein(ha, hb, p) << "\n";
    return 0;
}

RealGrid depth_map(const std::string& source, int width, int height) {
    if (source == "ramp") {
        // Horizontal ramp: depth 0 at the left column, 1 at the right column.
        RealGrid d(width, height);
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                d.at(x, y) = width > 1 ? static_cast<double>(x) / (width - 1) : 0.0;
            }
        }
        return d;
    }
    auto d = load_pfm(source);
    if (d.width != width || d.height != height) {
        throw ValidationError("depth map size does not match the clean image");
    }
    return d;
}

int cmd_synth(const std::string& clean_path, const std::string& airlight,
              std::optional<double> t, const std::string& depth, std::optional<double> beta,
              const std::string& out) {
    const auto clean = load_image(clean_path);
    const auto light = parse_rgb(airlight);
    SyntheticHazeParams params;
    if (t) {
        if (!(*t >= 0.0 && *t <= 1.0)) throw ValidationError("--t must lie in [0, 1]");
        params = SyntheticHazeParams::uniform(light.rgb, clean.width(), clean.height(), *t);
    } else if (!depth.empty() && beta) {
        params = SyntheticHazeParams::from_depth(light.rgb, *beta,
                                                 depth_map(depth, clean.width(), clean.height()));
    } else {
        throw ValidationError("synth needs either --t or both --depth and --beta");
    }
    save_image(synthesize_hazy(clean, params), out);
    return 0;
}

struct AugmentArgs {
    std::string source;
    std::string target;
    std::string out;
    std::string pairs;
    std::uint64_t seed = 0;
    int samples_per_pair = 1;
    std::string mode = "adapt";
    std::optional<int> subset;
    std::string airlight;
    int control_points = 8;
    double p = 1.0;
    bool oracle = false;
    bool debug = false;
};

int cmd_augment(const AugmentArgs& a) {
    RunConfig cfg;
    cfg.mode = parse_run_mode(a.mode);
    cfg.seed = a.seed;
    cfg.samples_per_pair = a.samples_per_pair;
    cfg.p = a.p;
    cfg.subset_k = a.subset;
    cfg.control_points = a.control_points;
    cfg.oracle = a.oracle;
    cfg.debug = a.debug;
    cfg.output_dir = a.out;
    if (!a.airlight.empty()) cfg.airlight_override = parse_rgb(a.airlight);

    DatasetManifest source;
    if (!a.pairs.empty()) {
        source = read_pairs_file(a.pairs);
    } else if (!a.source.empty()) {
        source = discover_pairs(a.source);
    } else {
        throw ValidationError("augment needs --source or --pairs");
    }
    if (source.pairs.empty()) throw ValidationError("no hazy/GT pairs found");

    std::optional<TargetDomain> target;
    if (cfg.mode != RunMode::Generalize) {
        if (a.target.empty()) throw ValidationError(a.mode + " mode requires --target");
        target = load_target_images(a.target);
    }
    const auto summary = run_augment(source, target, cfg);
    std::cerr << "augmented " << summary.pairs << " pairs, " << summary.samples << " samples\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Density-aware mixup augmentation for paired hazy/clean images"};
    app.set_version_flag("--version", std::string(HAZEMIX_VERSION));
    app.require_subcommand(1);

    std::string image;
    std::string json_out;
    auto* density = app.add_subcommand("density", "Print or save the brightness density sidecar");
    density->add_option("image", image, "Input image")->required();
    density->add_option("--json", json_out, "Write the sidecar to this path");

    int patch = kDefaultDarkChannelPatch;
    auto* airlight = app.add_subcommand("airlight", "Estimate the atmospheric light as R,G,B");
    airlight->add_option("image", image, "Input hazy image")->required();
    airlight->add_option("--patch", patch, "Dark channel window size (odd)");

    std::string image_b;
    double p = 1.0;
    auto* distance = app.add_subcommand("distance", "Wasserstein distance between two densities");
    distance->add_option("imageA", image, "First image")->required();
    distance->add_option("imageB", image_b, "Second image")->required();
    distance->add_option("--p", p, "Wasserstein order (>= 1)");

    std::string clean;
    std::string synth_airlight;
    std::optional<double> t;
    std::string depth;
    std::optional<double> beta;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "Render a hazy image with the scattering model");
    synth->add_option("--clean", clean, "Haze-free input image")->required();
    synth->add_option("--airlight", synth_airlight, "Atmospheric light R,G,B")->required();
    auto* t_opt = synth->add_option("--t", t, "Uniform transmission in [0, 1]");
    auto* depth_opt = synth->add_option("--depth", depth, "'ramp' or a PFM depth map");
    auto* beta_opt = synth->add_option("--beta", beta, "Scattering coefficient");
    t_opt->excludes(depth_opt)->excludes(beta_opt);
    depth_opt->needs(beta_opt);
    beta_opt->needs(depth_opt);
    synth->add_option("--out", synth_out, "Output PNG")->required();

    AugmentArgs aug;
    auto* augment = app.add_subcommand("augment", "Generate augmented samples for a dataset");
    augment->add_option("--source", aug.source, "Directory of <id>_hazy / <id>_GT pairs");
    augment->add_option("--pairs", aug.pairs, "JSON file listing explicit pairs");
    augment->add_option("--target", aug.target, "Directory of target-domain hazy images");
    augment->add_option("--out", aug.out, "Output directory")->required();
    augment->add_option("--seed", aug.seed, "Run seed")->required();
    augment->add_option("--samples-per-pair", aug.samples_per_pair, "Samples per pair");
    augment->add_option("--mode", aug.mode, "adapt | generalize | scalar-ablation");
    augment->add_option("--subset", aug.subset, "Mix only a random k-subset of targets");
    augment->add_option("--airlight", aug.airlight, "Override atmospheric light R,G,B");
    augment->add_option("--control-points", aug.control_points,
                        "Quantile control points for generalize mode");
    augment->add_option("--p", aug.p, "Wasserstein order (>= 1)");
    augment->add_flag("--oracle", aug.oracle, "Also record the reference solver objective");
    augment->add_flag("--debug", aug.debug, "Dump weights and histograms under out/debug");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*density) return cmd_density(image, json_out);
        if (*airlight) return cmd_airlight(image, patch);
        if (*distance) return cmd_distance(image, image_b, p);
        if (*synth) return cmd_synth(clean, synth_airlight, t, depth, beta, synth_out);
        if (*augment) return cmd_augment(aug);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
