#pragma once

#include <filesystem>

#include "hazemix/image.hpp"

namespace hazemix {

/// Loads a PNG or JPEG file as 8-bit RGB. Grayscale and palette images are
/// expanded, alpha is dropped, 16-bit samples keep their high byte.
/// Throws IoError (unreadable), FormatError (neither PNG nor JPEG) or
/// CorruptDataError (decoder failure).
RgbImage load_image(const std::filesystem::path& path);

/// Writes an 8-bit RGB PNG. Throws IoError on failure.
void save_image(const RgbImage& img, const std::filesystem::path& path);

/// Portable float map, one channel, little endian, bottom-up rows as the
/// format requires.
void save_pfm(const RealGrid& grid, const std::filesystem::path& path);
RealGrid load_pfm(const std::filesystem::path& path);

}  // namespace hazemix
