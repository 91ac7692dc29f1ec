#include "oldn/codec_sim/color.hpp"

namespace oldn {
namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 invert(const Mat3& m) {
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  Mat3 inv{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const int r1 = (c + 1) % 3, r2 = (c + 2) % 3;
      const int c1 = (r + 1) % 3, c2 = (r + 2) % 3;
      inv[r][c] = (m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]) / det;
    }
  }
  return inv;
}

const Mat3& yuv_to_rgb_matrix() {
  static const Mat3 inv = invert(kRgbToYuv);
  return inv;
}

}  // namespace

Yuv420Frame rgb_to_yuv420(const RgbImage& image) {
  const int w = image.width;
  const int h = image.height;
  if (w % 2 != 0 || h % 2 != 0) throw Error(ErrorCode::kDivisibility, "RGB image needs even extent for 4:2:0");
  if (image.rgb.size() != static_cast<std::size_t>(w) * h * 3) {
    throw Error(ErrorCode::kSizeMismatch, "RGB buffer length");
  }
  Yuv420Frame f{Plane(w, h), Plane(w / 2, h / 2), Plane(w / 2, h / 2)};
  for (int cy = 0; cy < h / 2; ++cy) {
    for (int cx = 0; cx < w / 2; ++cx) {
      double u_sum = 0.0;
      double v_sum = 0.0;
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          const int x = 2 * cx + dx;
          const int y = 2 * cy + dy;
          const std::uint8_t* px = image.pixel(x, y);
          double yuv[3];
          for (int r = 0; r < 3; ++r) {
            yuv[r] = kRgbToYuv[r][0] * px[0] + kRgbToYuv[r][1] * px[1] + kRgbToYuv[r][2] * px[2] + kYuvOffset[r];
          }
          f.y.at(x, y) = clamp_to_u8(yuv[0]);
          u_sum += yuv[1];
          v_sum += yuv[2];
        }
      }
      f.u.at(cx, cy) = clamp_to_u8(u_sum / 4.0);
      f.v.at(cx, cy) = clamp_to_u8(v_sum / 4.0);
    }
  }
  return f;
}

RgbImage yuv420_to_rgb(const Yuv420Frame& frame) {
  frame.validate();
  const Mat3& m = yuv_to_rgb_matrix();
  RgbImage out(frame.width(), frame.height());
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      const double yuv[3] = {frame.y.at(x, y) - kYuvOffset[0], frame.u.at(x / 2, y / 2) - kYuvOffset[1],
                             frame.v.at(x / 2, y / 2) - kYuvOffset[2]};
      std::uint8_t* px = out.pixel(x, y);
      for (int r = 0; r < 3; ++r) px[r] = clamp_to_u8(m[r][0] * yuv[0] + m[r][1] * yuv[1] + m[r][2] * yuv[2]);
    }
  }
  return out;
}

}  // namespace oldn
