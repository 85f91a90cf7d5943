#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace hazemix {

using Level = std::uint8_t;
using Rgb = std::array<Level, 3>;

inline constexpr int kLevels = 256;

/// 8-bit RGB raster, row-major, top-left origin, channels interleaved R,G,B.
class RgbImage {
public:
    RgbImage(int width, int height);
    RgbImage(int width, int height, Rgb fill);
    RgbImage(int width, int height, std::vector<Level> data);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

    Rgb at(int x, int y) const {
        const auto* p = &data_[index(x, y) * 3];
        return {p[0], p[1], p[2]};
    }
    void set(int x, int y, Rgb v) {
        auto* p = &data_[index(x, y) * 3];
        p[0] = v[0];
        p[1] = v[1];
        p[2] = v[2];
    }

    std::span<const Level> data() const { return data_; }
    std::span<Level> data() { return data_; }

    bool operator==(const RgbImage&) const = default;

private:
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

    int width_;
    int height_;
    std::vector<Level> data_;
};

/// Single-channel 8-bit raster.
class BrightnessImage {
public:
    BrightnessImage(int width, int height, Level fill = 0);
    BrightnessImage(int width, int height, std::vector<Level> data);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return data_.size(); }

    Level at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    void set(int x, int y, Level v) { data_[static_cast<std::size_t>(y) * width_ + x] = v; }

    std::span<const Level> data() const { return data_; }
    std::span<Level> data() { return data_; }

    bool operator==(const BrightnessImage&) const = default;

private:
    int width_;
    int height_;
    std::vector<Level> data_;
};

/// Real-valued single-channel grid, used for transmission, depth and mix weights.
struct RealGrid {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    RealGrid() = default;
    RealGrid(int w, int h, double fill = 0.0)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// HSV value channel: max(R, G, B) per pixel.
BrightnessImage to_brightness(const RgbImage& img);

inline Level brightness_of(Rgb v) { return std::max({v[0], v[1], v[2]}); }

/// Round half away from zero and clamp to {0..255}.
Level quantize(double v);

/// Parameters of the atmospheric scattering model I = J t + A (1 - t).
/// Either give the transmission directly, or a scattering coefficient and a
/// depth map from which t = exp(-scatter * depth).
struct SyntheticHazeParams {
    Rgb airlight{};
    RealGrid transmission;

    static SyntheticHazeParams uniform(Rgb airlight, int width, int height, double t);
    static SyntheticHazeParams from_depth(Rgb airlight, double scatter_coefficient,
                                          const RealGrid& depth);
};

RgbImage synthesize_hazy(const RgbImage& clean, const SyntheticHazeParams& params);

}  // namespace hazemix
