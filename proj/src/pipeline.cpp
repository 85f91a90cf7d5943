#include "hazemix/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "hazemix/alignment.hpp"
#include "hazemix/errors.hpp"
#include "hazemix/image_io.hpp"
#include "hazemix/reference_solver.hpp"
#include "hazemix/sidecar.hpp"

namespace hazemix {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool has_image_extension(const fs::path& p) {
    const auto ext = lower(p.extension().string());
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

void require_directory(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw IoError("'" + dir.string() + "' is not a directory");
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void save_image_atomic(const RgbImage& img, const fs::path& path) {
    fs::path tmp = path;
    tmp += ".tmp";
    save_image(img, tmp);
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move '" + tmp.string() + "' into place");
    }
}

json theta_json(const SimplexWeights& w) { return w.theta(); }

// Everything one pair contributes to the run manifest.
struct PairOutcome {
    json record;
    std::size_t samples = 0;
};

}  // namespace

DatasetManifest discover_pairs(const fs::path& dir) {
    require_directory(dir);
    std::map<std::string, fs::path> hazy;
    std::map<std::string, fs::path> clean;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || !has_image_extension(entry.path())) continue;
        const std::string stem = entry.path().stem().string();
        if (ends_with(stem, "_hazy")) {
            hazy.emplace(stem.substr(0, stem.size() - 5), entry.path());
        } else if (ends_with(stem, "_GT")) {
            clean.emplace(stem.substr(0, stem.size() - 3), entry.path());
        }
    }
    DatasetManifest manifest;
    for (const auto& [id, path] : hazy) {
        const auto it = clean.find(id);
        if (it != clean.end()) manifest.pairs.push_back({path, it->second, id});
    }
    return manifest;
}

DatasetManifest read_pairs_file(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open pairs file '" + file.string() + "'");
    DatasetManifest manifest;
    const fs::path base = file.parent_path();
    try {
        const auto j = json::parse(in);
        if (j.at("version").get<int>() != 1) throw ValidationError("unsupported pairs file version");
        for (const auto& p : j.at("pairs")) {
            fs::path hazy = p.at("hazy").get<std::string>();
            fs::path clean = p.at("clean").get<std::string>();
            if (hazy.is_relative()) hazy = base / hazy;
            if (clean.is_relative()) clean = base / clean;
            manifest.pairs.push_back({hazy, clean, p.at("id").get<std::string>()});
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed pairs file: ") + e.what());
    }
    std::vector<std::string> ids;
    for (const auto& p : manifest.pairs) ids.push_back(p.id);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
        throw ValidationError("pairs file contains duplicate ids");
    }
    return manifest;
}

std::vector<fs::path> list_images(const fs::path& dir) {
    require_directory(dir);
    std::vector<fs::path> images;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && has_image_extension(entry.path())) {
            images.push_back(entry.path());
        }
    }
    std::sort(images.begin(), images.end());
    return images;
}

TargetDomain load_target_images(const fs::path& dir, int grid_size) {
    const auto images = list_images(dir);
    if (images.empty()) {
        throw ValidationError("target directory '" + dir.string() + "' contains no images");
    }
    std::vector<DensityHistogram> hists;
    std::vector<std::string> ids;
    for (const auto& path : images) {
        auto cached = read_cached_density(path);
        if (!cached) {
            cached = estimate_density(to_brightness(load_image(path)));
            write_cached_density(path, *cached);
        }
        hists.push_back(*cached);
        ids.push_back(path.filename().string());
    }
    return TargetDomain(std::move(hists), std::move(ids), grid_size);
}

RunMode parse_run_mode(const std::string& s) {
    if (s == "adapt") return RunMode::Adapt;
    if (s == "generalize") return RunMode::Generalize;
    if (s == "scalar-ablation") return RunMode::ScalarAblation;
    throw ValidationError("unknown mode '" + s + "' (adapt, generalize, scalar-ablation)");
}

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::Adapt: return "adapt";
        case RunMode::Generalize: return "generalize";
        case RunMode::ScalarAblation: return "scalar-ablation";
    }
    return "adapt";
}

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("HAZEMIX_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

PairOutcome augment_pair(const ImagePair& pair, const std::optional<TargetDomain>& target,
                         const RunConfig& cfg) {
    const auto hazy = load_image(pair.hazy);
    const auto clean = load_image(pair.clean);
    if (hazy.width() != clean.width() || hazy.height() != clean.height()) {
        throw ValidationError("pair '" + pair.id + "': hazy and GT dimensions differ");
    }
    const auto hazy_b = to_brightness(hazy);
    const Level max_b = *std::max_element(hazy_b.data().begin(), hazy_b.data().end());
    const AtmosphericLight light = cfg.airlight_override
                                       ? enforce_feasible(*cfg.airlight_override, max_b)
                                       : estimate_airlight(hazy);

    const fs::path& out = cfg.output_dir;
    const std::string gt_name = pair.id + "_GT.png";
    PairOutcome outcome;
    json& rec = outcome.record;
    rec["id"] = pair.id;
    rec["hazy"] = pair.hazy.filename().string();
    rec["clean"] = pair.clean.filename().string();
    rec["gt_file"] = gt_name;
    rec["airlight"] = light.rgb;
    rec["samples"] = json::array();

    // GT goes first so no augmented image can exist without its ground truth.
    save_image_atomic(clean, out / gt_name);

    const DamixOptions options{cfg.p, kDefaultQuantileGrid};
    for (int s = 0; s < cfg.samples_per_pair; ++s) {
        const std::uint64_t sub_seed = derive_seed(cfg.seed, pair.id, static_cast<std::uint64_t>(s));
        Rng rng(sub_seed);
        json sample;
        sample["index"] = s;
        sample["substream_seed"] = sub_seed;
        const std::string file = pair.id + "_damix" + std::to_string(s) + ".png";
        sample["file"] = file;

        std::optional<DensityHistogram> target_density;
        RgbImage result = hazy;
        MixWeights weights(hazy.width(), hazy.height());
        if (cfg.mode == RunMode::Generalize) {
            auto rt = random_target(rng, cfg.control_points);
            sample["control_points"] = rt.control_points;
            target_density = rt.histogram;
        } else {
            const int k = static_cast<int>(target->size());
            const auto theta = cfg.subset_k ? sample_theta_subset(k, *cfg.subset_k, rng)
                                            : sample_theta(k, rng);
            sample["theta"] = theta_json(theta);
            target_density = interpolate_target(*target, theta);
        }

        double residual = 0.0;
        double initial = 0.0;
        if (cfg.mode == RunMode::ScalarAblation) {
            const double target_mean = histogram_mean(*target_density);
            auto mix = scalar_damix(hazy, clean, light, target_mean);
            sample["target_mean"] = target_mean;
            sample["lambda"] = mix.lambda;
            sample["mix_mode"] = mix.mode == MixMode::Thinner ? "thinner" : "thicker";
            result = std::move(mix.image);
            initial = wasserstein(estimate_density(hazy_b), *target_density, cfg.p);
            residual = wasserstein(estimate_density(to_brightness(result)), *target_density, cfg.p);
        } else {
            auto d = damix(hazy, clean, light, *target_density, options);
            residual = d.residual_distance;
            initial = d.initial_distance;
            sample["fell_back"] = d.fell_back;
            result = std::move(d.image);
            weights = std::move(d.weights);
        }
        sample["residual_distance"] = residual;
        sample["initial_distance"] = initial;

        if (cfg.oracle) {
            if (hazy.pixel_count() <= kMaxOraclePixels && cfg.p == 1.0) {
                const auto solved =
                    pgd_solve(hazy_b, to_brightness(clean), light.brightness(), *target_density);
                sample["oracle_objective"] = solved.objective;
                sample["oracle_iterations"] = solved.iterations;
            } else {
                sample["oracle_objective"] = nullptr;
            }
        }

        save_image_atomic(result, out / file);
        if (cfg.debug) {
            const fs::path dbg = out / "debug";
            const std::string stem = pair.id + "_damix" + std::to_string(s);
            save_pfm(weights.alpha, dbg / (stem + "_alpha.pfm"));
            save_pfm(weights.beta, dbg / (stem + "_beta.pfm"));
            write_histogram_sidecar(estimate_density(to_brightness(result)),
                                    dbg / (stem + "_achieved.json"));
            write_histogram_sidecar(*target_density, dbg / (stem + "_target.json"));
        }
        rec["samples"].push_back(std::move(sample));
        ++outcome.samples;
    }
    return outcome;
}

}  // namespace

RunSummary run_augment(const DatasetManifest& source, const std::optional<TargetDomain>& target,
                       const RunConfig& cfg) {
    if (cfg.samples_per_pair < 1) throw ValidationError("samples per pair must be >= 1");
    if (!(cfg.p >= 1.0)) throw ValidationError("Wasserstein order p must be >= 1");
    if (cfg.subset_k && *cfg.subset_k < 1) throw ValidationError("subset size must be >= 1");
    if (cfg.mode == RunMode::Generalize && cfg.control_points < 2) {
        throw ValidationError("generalize mode needs at least 2 control points");
    }
    if (cfg.mode != RunMode::Generalize && !target) {
        throw ValidationError(to_string(cfg.mode) + " mode requires a target domain");
    }
    {
        std::vector<std::string> ids;
        for (const auto& p : source.pairs) ids.push_back(p.id);
        std::sort(ids.begin(), ids.end());
        if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
            throw ValidationError("source pairs contain duplicate ids");
        }
    }

    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec || !fs::is_directory(cfg.output_dir)) {
        throw IoError("cannot create output directory '" + cfg.output_dir.string() + "'");
    }
    if (cfg.debug) {
        fs::create_directories(cfg.output_dir / "debug", ec);
        if (ec) throw IoError("cannot create debug directory");
    }
    if (target) save_target_domain(*target, cfg.output_dir / "target_domain");

    const std::size_t n = source.pairs.size();
    std::vector<PairOutcome> outcomes(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(resolve_threads(cfg.threads), std::max<std::size_t>(n, 1)));

    auto work = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            try {
                outcomes[i] = augment_pair(source.pairs[i], target, cfg);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    json manifest;
    manifest["version"] = 1;
    manifest["tool_version"] = HAZEMIX_VERSION;
    manifest["mode"] = to_string(cfg.mode);
    manifest["seed"] = cfg.seed;
    manifest["samples_per_pair"] = cfg.samples_per_pair;
    manifest["p"] = cfg.p;
    manifest["grid_size"] = kDefaultQuantileGrid;
    manifest["subset_k"] = cfg.subset_k ? json(*cfg.subset_k) : json(nullptr);
    manifest["control_points"] = cfg.control_points;
    manifest["airlight_override"] =
        cfg.airlight_override ? json(cfg.airlight_override->rgb) : json(nullptr);
    manifest["target_domain"] = target ? json(target->source_ids()) : json(nullptr);
    manifest["pairs"] = json::array();
    RunSummary summary;
    for (auto& o : outcomes) {
        manifest["pairs"].push_back(std::move(o.record));
        summary.samples += o.samples;
    }
    summary.pairs = n;
    write_file_atomic(cfg.output_dir / "run_manifest.json", manifest.dump(2) + "\n");
    return summary;
}

}  // namespace hazemix
