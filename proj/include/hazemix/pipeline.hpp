#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hazemix/airlight.hpp"
#include "hazemix/target_sampler.hpp"

namespace hazemix {

struct ImagePair {
    std::filesystem::path hazy;
    std::filesystem::path clean;
    std::string id;
};

struct DatasetManifest {
    std::vector<ImagePair> pairs;
};

/// Finds "<id>_hazy.<ext>" / "<id>_GT.<ext>" pairs (png, jpg, jpeg), sorted by id.
/// Unmatched files are ignored.
DatasetManifest discover_pairs(const std::filesystem::path& dir);

/// Reads {"version": 1, "pairs": [{"id", "hazy", "clean"}]}; relative paths
/// resolve against the manifest's directory.
DatasetManifest read_pairs_file(const std::filesystem::path& file);

/// Every image file (png, jpg, jpeg) in a directory, sorted by name.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

/// Loads target images and their densities, reusing valid cache sidecars.
TargetDomain load_target_images(const std::filesystem::path& dir,
                                int grid_size = kDefaultQuantileGrid);

enum class RunMode { Adapt, Generalize, ScalarAblation };

RunMode parse_run_mode(const std::string& s);
std::string to_string(RunMode mode);

struct RunConfig {
    RunMode mode = RunMode::Adapt;
    std::uint64_t seed = 0;
    int samples_per_pair = 1;
    double p = 1.0;
    std::optional<AtmosphericLight> airlight_override;
    std::optional<int> subset_k;
    int control_points = 8;  ///< generalize mode
    bool oracle = false;     ///< also run the reference solver where small enough
    bool debug = false;      ///< dump weights and histograms under out/debug
    unsigned threads = 0;    ///< 0 uses HAZEMIX_THREADS or the hardware count
    std::filesystem::path output_dir;
};

struct RunSummary {
    std::size_t pairs = 0;
    std::size_t samples = 0;
};

/// Worker count: explicit request, else HAZEMIX_THREADS, else hardware.
unsigned resolve_threads(unsigned requested);

/// Augments every pair and writes "<id>_damix<k>.png", "<id>_GT.png" and
/// run_manifest.json into cfg.output_dir. `target` is required in adapt and
/// scalar-ablation modes.
RunSummary run_augment(const DatasetManifest& source, const std::optional<TargetDomain>& target,
                       const RunConfig& cfg);

}  // namespace hazemix
