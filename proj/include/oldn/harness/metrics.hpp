#pragma once

#include "oldn/codec_sim/plane.hpp"

namespace oldn {

inline constexpr double kPsnrCap = 99.0;

// 10·log10(255²/MSE), capped at kPsnrCap. Throws kShapeMismatch on differing extents.
double psnr(const Plane& a, const Plane& b);
double psnr_from_mse(double mse);

}  // namespace oldn
