#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "hazemix/density.hpp"

namespace hazemix {

inline constexpr int kSidecarVersion = 1;

/// { "version": 1, "pixel_count": N, "bins": [256 floats] }
nlohmann::json histogram_to_json(const DensityHistogram& h);
DensityHistogram histogram_from_json(const nlohmann::json& j);

void write_histogram_sidecar(const DensityHistogram& h, const std::filesystem::path& path);
DensityHistogram read_histogram_sidecar(const std::filesystem::path& path);

/// Writes to a temporary sibling then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Density cache next to an image: "<image>.density.json" carrying the
/// image's byte size and mtime. Returns nothing when missing or stale.
std::filesystem::path cache_path_for(const std::filesystem::path& image);
std::optional<DensityHistogram> read_cached_density(const std::filesystem::path& image);
/// Best effort; returns false if the cache could not be written.
bool write_cached_density(const std::filesystem::path& image, const DensityHistogram& h);

}  // namespace hazemix
