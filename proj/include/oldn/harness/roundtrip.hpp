#pragma once

#include <array>

#include "oldn/codec_sim/plane.hpp"
#include "oldn/network/params.hpp"
#include "oldn/param_codec/huffman.hpp"
#include "oldn/training/online.hpp"

namespace oldn {

struct RoundtripOptions {
  bool online = true;
  OnlineConfig online_config;
  int prec = kDefaultPrec;
};

// Encoder side for one chroma plane: online training, residual
// quantization and entropy coding, plus the encoder's own reconstruction
// from the quantized weights.
struct EncodedPlane {
  OnlineResult training;
  ResidualSymbols residual;
  AlResidualStream stream;
  Tensor<float> output;  // network output with the quantized weights, unclamped
  Plane enhanced;
};

EncodedPlane encode_plane(const ModelParams& baseline, const Plane& degraded_luma, const Plane& degraded_chroma,
                          const Plane& raw_chroma, const RoundtripOptions& options);

struct DecodedPlane {
  ResidualSymbols residual;
  Tensor<float> output;
  Plane enhanced;
};

DecodedPlane decode_plane(const ModelParams& baseline, const Plane& degraded_luma, const Plane& degraded_chroma,
                          const AlResidualStream& stream);

struct PlaneReport {
  double degraded_psnr = 0.0;
  double baseline_psnr = 0.0;  // baseline model output
  double enhanced_psnr = 0.0;  // decoder output
  std::size_t side_bits = 0;
  bool parity_ok = false;
  bool residual_zero = false;
  bool safeguard_used = false;
};

struct RoundtripReport {
  int qp = 0;
  double image_bits = 0.0;  // rate proxy over Y, U and V levels
  std::size_t side_bits = 0;
  // Chroma figures are the mean over U and V.
  double degraded_psnr = 0.0;
  double baseline_psnr = 0.0;
  double enhanced_psnr = 0.0;
  bool parity_ok = false;
  std::array<PlaneReport, 2> planes;  // U, V
  Yuv420Frame degraded;
  Yuv420Frame enhanced;  // degraded luma with decoder chroma
  Yuv420Frame baseline;  // degraded luma with baseline-model chroma
};

RoundtripReport simulate_roundtrip(const Yuv420Frame& raw, int qp, const ModelParams& model,
                                   const RoundtripOptions& options);
RoundtripReport simulate_roundtrip(const RgbImage& raw, int qp, const ModelParams& model,
                                   const RoundtripOptions& options);

}  // namespace oldn
