#pragma once

#include "hazemix/image.hpp"

namespace hazemix {

inline constexpr int kDefaultDarkChannelPatch = 15;

/// Global atmospheric light A with its brightness A_b = max(A).
struct AtmosphericLight {
    Rgb rgb{};
    Level brightness() const { return brightness_of(rgb); }

    bool operator==(const AtmosphericLight&) const = default;
};

/// Per pixel minimum over channels and over a patch x patch window clamped to
/// the image. Throws ValidationError for an even or nonpositive patch.
BrightnessImage dark_channel(const RgbImage& img, int patch);

struct AirlightEstimate {
    AtmosphericLight raw;       ///< mean of the brightest 0.1% dark-channel pixels
    AtmosphericLight enforced;  ///< raised so that A_b >= max I_b
};

AirlightEstimate estimate_airlight_detailed(const RgbImage& hazy,
                                            int patch = kDefaultDarkChannelPatch);

/// Dark-channel-prior airlight with the feasibility guarantee A_b >= max I_b.
AtmosphericLight estimate_airlight(const RgbImage& hazy, int patch = kDefaultDarkChannelPatch);

/// Raises every channel by the smallest common offset such that
/// max(rgb) >= max_brightness.
AtmosphericLight enforce_feasible(AtmosphericLight light, Level max_brightness);

}  // namespace hazemix
