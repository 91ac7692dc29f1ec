#include "oldn/codec_sim/degrade.hpp"

#include <cmath>

#include "oldn/freq/dct.hpp"

namespace oldn {

QpConfig::QpConfig(int qp_value) : qp(qp_value) {
  if (qp < kMinQp || qp > kMaxQp) {
    throw Error(ErrorCode::kInvalidArgument, "QP " + std::to_string(qp) + " outside [0,51]");
  }
}

double QpConfig::qstep() const noexcept {
  return std::exp2((qp - 4) / 6.0);
}

double qstep_for_qp(int qp) {
  return QpConfig(qp).qstep();
}

DegradedPlane degrade_plane_with_levels(const Plane& p, QpConfig cfg) {
  const DctKernelBank& bank = default_dct_bank();
  const int n = bank.block_size();
  const int pw = (p.width + n - 1) / n * n;
  const int ph = (p.height + n - 1) / n * n;
  const Plane padded = (pw == p.width && ph == p.height) ? p : pad_plane(p, pw, ph);

  Tensor<double> pixels(Shape{1, 1, ph, pw});
  for (std::size_t i = 0; i < padded.samples.size(); ++i) pixels[i] = padded.samples[i];

  Tensor<double> coeffs = dct_conv(pixels, bank);
  const double step = cfg.qstep();
  DegradedPlane out;
  out.levels.resize(coeffs.size());
  // Block-major order: for each block, its 64 channel coefficients.
  const Shape& cs = coeffs.shape();
  std::size_t k = 0;
  for (int by = 0; by < cs.h; ++by) {
    for (int bx = 0; bx < cs.w; ++bx) {
      for (int c = 0; c < cs.c; ++c) {
        double& v = coeffs.at(0, c, by, bx);
        const double level = std::round(v / step);
        out.levels[k++] = static_cast<std::int32_t>(level);
        v = level * step;
      }
    }
  }
  const Tensor<double> recon = idct_conv(coeffs, bank);
  Plane result(pw, ph);
  for (std::size_t i = 0; i < result.samples.size(); ++i) result.samples[i] = clamp_to_u8(recon[i]);
  out.plane = (pw == p.width && ph == p.height) ? std::move(result) : crop_plane(result, p.width, p.height);
  return out;
}

DegradedFrame degrade_frame(const Yuv420Frame& frame, QpConfig cfg) {
  frame.validate();
  DegradedFrame out;
  Plane* dst[] = {&out.frame.y, &out.frame.u, &out.frame.v};
  const Plane* src[] = {&frame.y, &frame.u, &frame.v};
  for (int i = 0; i < 3; ++i) {
    DegradedPlane d = degrade_plane_with_levels(*src[i], cfg);
    *dst[i] = std::move(d.plane);
    out.levels.insert(out.levels.end(), d.levels.begin(), d.levels.end());
  }
  return out;
}

}  // namespace oldn
