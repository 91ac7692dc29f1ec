#pragma once

#include <cstdint>
#include <vector>

#include "oldn/codec_sim/plane.hpp"

namespace oldn {

inline constexpr int kMinQp = 0;
inline constexpr int kMaxQp = 51;

// Quantizer step doubles every 6 QP, qstep(4) = 1.
struct QpConfig {
  int qp = 27;

  explicit QpConfig(int qp_value);
  double qstep() const noexcept;
};

double qstep_for_qp(int qp);

struct DegradedPlane {
  Plane plane;
  // Quantized coefficient levels, block-major in DCT channel order.
  std::vector<std::int32_t> levels;
};

// 8×8 block DCT-II, uniform quantization round(c/qstep)·qstep, inverse DCT,
// rounding and clamping. Extents that are not multiples of 8 are padded by
// edge replication and cropped afterwards.
DegradedPlane degrade_plane_with_levels(const Plane& p, QpConfig cfg);

inline Plane degrade_plane(const Plane& p, QpConfig cfg) {
  return degrade_plane_with_levels(p, cfg).plane;
}

struct DegradedFrame {
  Yuv420Frame frame;
  std::vector<std::int32_t> levels;  // Y, U, V concatenated
};

DegradedFrame degrade_frame(const Yuv420Frame& frame, QpConfig cfg);

}  // namespace oldn
