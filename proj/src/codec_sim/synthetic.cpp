#include "oldn/codec_sim/synthetic.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "oldn/error.hpp"

namespace oldn {
namespace {

using Rgb = std::array<double, 3>;

struct Shape2d {
  bool ellipse;
  double cx, cy, rx, ry;
  double softness;
  Rgb color;
};

struct Texture {
  double fx, fy, phase, amp;
  Rgb tint;
};

}  // namespace

RgbImage synthetic_image(int width, int height, std::uint64_t seed) {
  if (width < 1 || height < 1) throw Error(ErrorCode::kInvalidArgument, "synthetic image needs a positive extent");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto color = [&] { return Rgb{255 * unit(rng), 255 * unit(rng), 255 * unit(rng)}; };

  const Rgb c00 = color(), c10 = color(), c01 = color();

  std::vector<Shape2d> shapes(3 + rng() % 5);
  for (auto& s : shapes) {
    s.ellipse = (rng() & 1) != 0;
    s.cx = unit(rng) * width;
    s.cy = unit(rng) * height;
    s.rx = (0.08 + 0.3 * unit(rng)) * width;
    s.ry = (0.08 + 0.3 * unit(rng)) * height;
    s.softness = 0.5 + 3.0 * unit(rng);
    s.color = color();
  }

  std::vector<Texture> textures(2);
  for (auto& t : textures) {
    const double period = 3.0 + 20.0 * unit(rng);
    const double angle = std::numbers::pi * unit(rng);
    t.fx = std::cos(angle) / period;
    t.fy = std::sin(angle) / period;
    t.phase = 2 * std::numbers::pi * unit(rng);
    t.amp = 6.0 + 18.0 * unit(rng);
    t.tint = {unit(rng) - 0.5, unit(rng) - 0.5, unit(rng) - 0.5};
  }

  std::normal_distribution<double> noise(0.0, 2.0);
  RgbImage img(width, height);
  for (int y = 0; y < height; ++y) {
    const double fy = height > 1 ? static_cast<double>(y) / (height - 1) : 0.0;
    for (int x = 0; x < width; ++x) {
      const double fx = width > 1 ? static_cast<double>(x) / (width - 1) : 0.0;
      Rgb px;
      for (int k = 0; k < 3; ++k) px[k] = c00[k] + (c10[k] - c00[k]) * fx + (c01[k] - c00[k]) * fy;

      for (const auto& s : shapes) {
        const double dx = (x + 0.5 - s.cx) / s.rx;
        const double dy = (y + 0.5 - s.cy) / s.ry;
        // signed distance in pixels, roughly
        const double d = s.ellipse ? (std::sqrt(dx * dx + dy * dy) - 1.0) * std::min(s.rx, s.ry)
                                   : (std::max(std::abs(dx), std::abs(dy)) - 1.0) * std::min(s.rx, s.ry);
        const double a = 1.0 / (1.0 + std::exp(d / s.softness));
        for (int k = 0; k < 3; ++k) px[k] += a * (s.color[k] - px[k]);
      }

      for (const auto& t : textures) {
        const double v = t.amp * std::sin(2 * std::numbers::pi * (t.fx * x + t.fy * y) + t.phase);
        for (int k = 0; k < 3; ++k) px[k] += v * (1.0 + t.tint[k]);
      }

      std::uint8_t* out = img.pixel(x, y);
      for (int k = 0; k < 3; ++k) out[k] = clamp_to_u8(px[k] + noise(rng));
    }
  }
  return img;
}

}  // namespace oldn
