#include "oldn/codec_sim/plane.hpp"

#include <algorithm>
#include <cmath>

namespace oldn {

Plane::Plane(int w, int h, std::uint8_t fill)
    : width(w), height(h), samples(static_cast<std::size_t>(std::max(w, 0)) * std::max(h, 0), fill) {
  if (w < 0 || h < 0) throw Error(ErrorCode::kInvalidArgument, "negative plane extent");
}

void Yuv420Frame::validate() const {
  const auto check = [](const Plane& p, const char* name) {
    if (p.samples.size() != static_cast<std::size_t>(p.width) * p.height) {
      throw Error(ErrorCode::kSizeMismatch, std::string(name) + " plane sample count");
    }
  };
  check(y, "Y");
  check(u, "U");
  check(v, "V");
  if (y.width % 2 != 0 || y.height % 2 != 0) {
    throw Error(ErrorCode::kDivisibility, "4:2:0 frames need even luma extent");
  }
  for (const Plane* c : {&u, &v}) {
    if (c->width * 2 != y.width || c->height * 2 != y.height) {
      throw Error(ErrorCode::kShapeMismatch, "chroma plane is not half the luma extent");
    }
  }
}

std::uint8_t clamp_to_u8(double v) noexcept {
  if (!(v > 0.0)) return 0;
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::lround(v));
}

template <typename T>
Tensor<T> plane_to_tensor(const Plane& p) {
  Tensor<T> t(Shape{1, 1, p.height, p.width});
  for (std::size_t i = 0; i < p.samples.size(); ++i) t[i] = static_cast<T>(p.samples[i]) / T(255);
  return t;
}

template Tensor<float> plane_to_tensor(const Plane&);
template Tensor<double> plane_to_tensor(const Plane&);

Plane tensor_to_plane(const Tensor<float>& t) {
  const Shape& s = t.shape();
  if (s.b != 1 || s.c != 1) throw Error(ErrorCode::kShapeMismatch, "expected a single plane, got " + s.str());
  Plane p(s.w, s.h);
  for (std::size_t i = 0; i < p.samples.size(); ++i) p.samples[i] = clamp_to_u8(static_cast<double>(t[i]) * 255.0);
  return p;
}

Plane pad_plane(const Plane& p, int w, int h) {
  if (w < p.width || h < p.height || p.width == 0 || p.height == 0) {
    throw Error(ErrorCode::kInvalidArgument, "pad target smaller than plane");
  }
  Plane out(w, h);
  for (int y = 0; y < h; ++y) {
    const int sy = std::min(y, p.height - 1);
    for (int x = 0; x < w; ++x) out.at(x, y) = p.at(std::min(x, p.width - 1), sy);
  }
  return out;
}

Plane crop_plane(const Plane& p, int w, int h) {
  if (w > p.width || h > p.height) throw Error(ErrorCode::kInvalidArgument, "crop larger than plane");
  Plane out(w, h);
  for (int y = 0; y < h; ++y) {
    std::copy_n(p.samples.begin() + static_cast<std::ptrdiff_t>(y) * p.width, w,
                out.samples.begin() + static_cast<std::ptrdiff_t>(y) * w);
  }
  return out;
}

}  // namespace oldn
