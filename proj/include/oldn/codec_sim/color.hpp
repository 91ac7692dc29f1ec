#pragma once

#include <array>

#include "oldn/codec_sim/plane.hpp"

namespace oldn {

// Rows Y, U, V applied to (R, G, B), plus the offset column.
inline constexpr std::array<std::array<double, 3>, 3> kRgbToYuv{{
    {0.2126, 0.7152, 0.0722},
    {-0.1146, -0.3854, 0.5000},
    {0.5000, -0.4542, -0.0458},
}};
inline constexpr std::array<double, 3> kYuvOffset{16.0, 128.0, 128.0};

// Per-pixel matrix, 2×2 mean for chroma, rounded and clamped.
// Throws kDivisibility on odd extent.
Yuv420Frame rgb_to_yuv420(const RgbImage& image);

// Nearest-neighbour chroma upsampling, inverse matrix, rounded and clamped.
RgbImage yuv420_to_rgb(const Yuv420Frame& frame);

}  // namespace oldn
