#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "oldn/network/blocks.hpp"
#include "oldn/network/config.hpp"
#include "oldn/network/params.hpp"

namespace oldn {

// Parameter tree of the dual-domain network:
//
//   spatial.{chroma,luma}.head, .wbK     pixel-domain feature extraction
//   freq.{chroma,luma}.head, .wbK        DCT-domain feature extraction
//   freq.up                              DCT features → n@(H/2) via pixel_shuffle(4)
//   fuse                                 concat(spatial, freq) → n
//   recon.II                             reconstruction trunk (WB / OL-WB)
//   tail                                 n → 4, pixel_shuffle(2), + chroma
//
// He-uniform convolutions and dense layers, zero biases, AL weights 1.
ModelParams build_oldn(const ModelConfig& config, std::uint64_t seed);

// Which leaves of a bound model require gradients.
enum class GradScope {
  kNone,    // inference
  kAll,     // offline training
  kOnline,  // adaptive-layer weights only
};

// ModelParams placed on a tape as leaves.
template <typename T>
class BoundModel {
 public:
  BoundModel(Tape<T>& tape, const ModelParams& params, GradScope scope);

  // Y-guided dual-domain feature n@(H/2), everything upstream of the trunk.
  // luma: (B,1,2H,2W), chroma: (B,1,H,W), H and W multiples of 8.
  Var<T> features(const Var<T>& luma, const Var<T>& chroma) const;

  // Trunk, tail and global skip: returns the enhanced chroma (B,1,H,W).
  Var<T> reconstruct(const Var<T>& features, const Var<T>& chroma) const;

  Var<T> forward(const Var<T>& luma, const Var<T>& chroma) const {
    return reconstruct(features(luma, chroma), chroma);
  }

  const Var<T>& var(std::string_view path) const;
  // Replaces the leaf for `path`, e.g. to probe one parameter in isolation.
  // Throws kInvalidArgument for an unknown path, kShapeMismatch otherwise.
  void bind(std::string_view path, const Var<T>& v);
  const std::map<std::string, Var<T>, std::less<>>& vars() const noexcept { return vars_; }
  const ModelConfig& config() const noexcept { return config_; }

  WideBlockVars<T> wide_block(const std::string& prefix) const;
  OnlineWideBlockVars<T> online_block(const std::string& prefix) const;

 private:
  Var<T> branch(const Var<T>& x, const std::string& prefix) const;

  ModelConfig config_;
  std::map<std::string, Var<T>, std::less<>> vars_;
};

// Validates the (luma, chroma) pair for the network: luma exactly twice the
// chroma extent, chroma extent a multiple of 8.
void check_network_inputs(const Shape& luma, const Shape& chroma);

// Inference in single precision.
Tensor<float> oldn_forward(const ModelParams& params, const Tensor<float>& luma, const Tensor<float>& chroma);

// Path helpers shared with checkpoint loading.
std::string recon_prefix(std::size_t index);
std::string branch_block_prefix(std::string_view branch, int index);

}  // namespace oldn
