#include "hazemix/image.hpp"

#include <cmath>
#include <string>

#include "hazemix/errors.hpp"

namespace hazemix {

namespace {

void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
        throw ValidationError("image dimensions must be positive, got " + std::to_string(width) +
                              "x" + std::to_string(height));
    }
}

}  // namespace

RgbImage::RgbImage(int width, int height) : RgbImage(width, height, Rgb{0, 0, 0}) {}

RgbImage::RgbImage(int width, int height, Rgb fill) : width_(width), height_(height) {
    check_dims(width, height);
    data_.resize(pixel_count() * 3);
    for (std::size_t i = 0; i < pixel_count(); ++i) {
        data_[3 * i] = fill[0];
        data_[3 * i + 1] = fill[1];
        data_[3 * i + 2] = fill[2];
    }
}

RgbImage::RgbImage(int width, int height, std::vector<Level> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != pixel_count() * 3) {
        throw ValidationError("RGB buffer size does not match width*height*3");
    }
}

BrightnessImage::BrightnessImage(int width, int height, Level fill) : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * height, fill);
}

BrightnessImage::BrightnessImage(int width, int height, std::vector<Level> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * height) {
        throw ValidationError("brightness buffer size does not match width*height");
    }
}

BrightnessImage to_brightness(const RgbImage& img) {
    std::vector<Level> out(img.pixel_count());
    const auto src = img.data();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::max({src[3 * i], src[3 * i + 1], src[3 * i + 2]});
    }
    return BrightnessImage(img.width(), img.height(), std::move(out));
}

Level quantize(double v) {
    const double r = std::round(v);
    if (!(r > 0.0)) return 0;
    if (r >= 255.0) return 255;
    return static_cast<Level>(r);
}

SyntheticHazeParams SyntheticHazeParams::uniform(Rgb airlight, int width, int height, double t) {
    return {airlight, RealGrid(width, height, t)};
}

SyntheticHazeParams SyntheticHazeParams::from_depth(Rgb airlight, double scatter_coefficient,
                                                    const RealGrid& depth) {
    if (!(scatter_coefficient >= 0.0)) {
        throw ValidationError("scatter coefficient must be nonnegative");
    }
    SyntheticHazeParams params{airlight, RealGrid(depth.width, depth.height)};
    for (std::size_t i = 0; i < depth.values.size(); ++i) {
        if (!(depth.values[i] >= 0.0)) throw ValidationError("depth must be nonnegative");
        params.transmission.values[i] = std::exp(-scatter_coefficient * depth.values[i]);
    }
    return params;
}

RgbImage synthesize_hazy(const RgbImage& clean, const SyntheticHazeParams& params) {
    const auto& t = params.transmission;
    if (t.width != clean.width() || t.height != clean.height() ||
        t.values.size() != clean.pixel_count()) {
        throw ValidationError("transmission map size does not match the clean image");
    }
    RgbImage out(clean.width(), clean.height());
    const auto src = clean.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < clean.pixel_count(); ++i) {
        const double ti = t.values[i];
        if (!(ti >= 0.0 && ti <= 1.0)) {
            throw ValidationError("transmission values must lie in [0, 1]");
        }
        for (int c = 0; c < 3; ++c) {
            dst[3 * i + c] = quantize(src[3 * i + c] * ti + params.airlight[c] * (1.0 - ti));
        }
    }
    return out;
}

}  // namespace hazemix
