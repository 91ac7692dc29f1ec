#pragma once

#include <cstdint>
#include <vector>

#include "oldn/tensor/tensor.hpp"

namespace oldn {

// 8-bit samples, row-major.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> samples;

  Plane() = default;
  Plane(int w, int h, std::uint8_t fill = 0);

  std::uint8_t& at(int x, int y) { return samples[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return samples[static_cast<std::size_t>(y) * width + x]; }

  friend bool operator==(const Plane&, const Plane&) = default;
};

// Chroma planes are exactly half the luma extent per side.
struct Yuv420Frame {
  Plane y;
  Plane u;
  Plane v;

  int width() const noexcept { return y.width; }
  int height() const noexcept { return y.height; }
  // Throws kShapeMismatch when the planes violate the 4:2:0 layout.
  void validate() const;

  friend bool operator==(const Yuv420Frame&, const Yuv420Frame&) = default;
};

// Interleaved 8-bit RGB.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0) {}

  std::uint8_t* pixel(int x, int y) { return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
  const std::uint8_t* pixel(int x, int y) const {
    return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

std::uint8_t clamp_to_u8(double v) noexcept;

// Samples / 255 as a (1,1,H,W) tensor.
template <typename T>
Tensor<T> plane_to_tensor(const Plane& p);

// Inverse of plane_to_tensor with rounding and clamping to [0,255].
Plane tensor_to_plane(const Tensor<float>& t);

// Edge-replicating pad to (w,h) ≥ current extent; crop keeps the top-left corner.
Plane pad_plane(const Plane& p, int w, int h);
Plane crop_plane(const Plane& p, int w, int h);

}  // namespace oldn
