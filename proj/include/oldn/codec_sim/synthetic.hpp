#pragma once

#include <cstdint>

#include "oldn/codec_sim/plane.hpp"

namespace oldn {

// Deterministic natural-looking test content: colour gradients, filled
// shapes with soft edges, oriented sinusoidal texture and mild noise.
RgbImage synthetic_image(int width, int height, std::uint64_t seed);

}  // namespace oldn
