#pragma once

#include <vector>

#include "oldn/codec_sim/plane.hpp"
#include "oldn/network/model.hpp"

namespace oldn {

// Chroma area above which frames are tiled when OnlineConfig::tile is 0.
inline constexpr std::size_t kOnlineTileBudget = 128 * 128;
inline constexpr int kDefaultOnlineTile = 64;

struct OnlineConfig {
  int steps = 100;
  double lr = 1e-2;
  // Chroma tile side (multiple of 8). 0 picks kDefaultOnlineTile for frames
  // over kOnlineTileBudget chroma samples and no tiling otherwise.
  int tile = 0;

  void validate() const;
};

struct OnlineResult {
  AlSnapshot snapshot;
  std::vector<double> losses;  // loss of the weights before each step, then after the last
  double initial_loss = 0.0;
  double final_loss = 0.0;     // loss of the returned snapshot
  bool safeguard_used = false;
};

// Network-ready tensors for one chroma plane and its luma guide. Chroma is
// padded by edge replication to a multiple of 8, luma to twice that.
struct NetworkInput {
  Tensor<float> luma;
  Tensor<float> chroma;
  int width = 0;   // unpadded chroma extent
  int height = 0;
};

NetworkInput make_network_input(const Plane& luma, const Plane& chroma);

// Inference, cropped, rounded and clamped back to 8 bits.
Plane enhance_chroma(const ModelParams& params, const Plane& luma, const Plane& chroma);

// Adam on the adaptive-layer weights only, minimizing MSE between the
// network output for the degraded planes and the raw chroma. The baseline
// is not modified. If the last loss is above the initial one, the best
// snapshot seen is returned instead.
OnlineResult train_online(const ModelParams& baseline, const Plane& degraded_luma, const Plane& degraded_chroma,
                          const Plane& raw_chroma, const OnlineConfig& config);

}  // namespace oldn
