#include "oldn/network/model.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "oldn/freq/dct.hpp"

namespace oldn {
namespace {

constexpr int kSpatialChromaChannels = 4;   // pixel_unshuffle(2) of one plane
constexpr int kSpatialLumaChannels = 16;    // pixel_unshuffle(4) of one plane
constexpr int kFreqUpscale = 4;             // H/8 → H/2

void add_conv(ModelParams& p, const std::string& prefix, int cout, int cin, int k) {
  p.add(prefix + "w", Tensor<float>(Shape{cout, cin, k, k}), ParamRole::kFrozen);
  p.add(prefix + "b", Tensor<float>(Shape{cout, 1, 1, 1}), ParamRole::kFrozen);
}

void add_wide_convs(ModelParams& p, const std::string& prefix, const ModelConfig& c) {
  add_conv(p, prefix + "conv1.", c.n * c.expand, c.n, 3);
  add_conv(p, prefix + "conv2.", c.n, c.n * c.expand, 3);
}

void add_wide_block(ModelParams& p, const std::string& prefix, const ModelConfig& c) {
  add_wide_convs(p, prefix, c);
  add_conv(p, prefix + "cab.fc1.", c.n / c.cab_reduction, c.n, 1);
  add_conv(p, prefix + "cab.fc2.", c.n, c.n / c.cab_reduction, 1);
}

void add_online_block(ModelParams& p, const std::string& prefix, const ModelConfig& c) {
  add_wide_convs(p, prefix, c);
  p.add(prefix + "al.w", Tensor<float>(Shape{c.n, 1, 1, 1}, 1.0f), ParamRole::kOnline);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::string recon_prefix(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "recon.%02zu.", index);
  return buf;
}

std::string branch_block_prefix(std::string_view branch, int index) {
  return std::string(branch) + ".wb" + std::to_string(index) + ".";
}

ModelParams build_oldn(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  ModelParams p(config);
  const int n = config.n;
  const std::pair<const char*, int> branches[] = {
      {"spatial.chroma", kSpatialChromaChannels},
      {"spatial.luma", kSpatialLumaChannels},
      {"freq.chroma", default_dct_bank().channels()},
      {"freq.luma", default_dct_bank().channels()},
  };
  for (const auto& [name, cin] : branches) {
    add_conv(p, std::string(name) + ".head.", n, cin, 3);
    for (int i = 0; i < config.n_wb_branch; ++i) add_wide_block(p, branch_block_prefix(name, i), config);
  }
  add_conv(p, "freq.up.", n * kFreqUpscale * kFreqUpscale, n, 3);
  add_conv(p, "fuse.", n, 2 * n, 3);
  for (std::size_t i = 0; i < config.recon_blocks.size(); ++i) {
    if (config.recon_blocks[i] == BlockKind::kOnlineWide) {
      add_online_block(p, recon_prefix(i), config);
    } else {
      add_wide_block(p, recon_prefix(i), config);
    }
  }
  add_conv(p, "tail.", 4, n, 3);

  std::mt19937_64 rng(seed);
  for (auto& [path, param] : p.entries()) {
    if (param.role == ParamRole::kOnline || !path.ends_with(".w")) continue;
    const Shape& s = param.value.shape();
    const double bound = std::sqrt(6.0 / (static_cast<double>(s.c) * s.h * s.w));
    for (float& v : param.value.data()) v = static_cast<float>((2.0 * uniform01(rng) - 1.0) * bound);
  }
  return p;
}

void check_network_inputs(const Shape& luma, const Shape& chroma) {
  if (chroma.c != 1 || luma.c != 1) {
    throw Error(ErrorCode::kShapeMismatch, "network planes must have one channel: " + luma.str() + " / " + chroma.str());
  }
  if (!chroma.positive() || luma.b != chroma.b || luma.h != 2 * chroma.h || luma.w != 2 * chroma.w) {
    throw Error(ErrorCode::kShapeMismatch, "luma " + luma.str() + " must be twice chroma " + chroma.str());
  }
  if (chroma.h % 8 != 0 || chroma.w % 8 != 0) {
    throw Error(ErrorCode::kDivisibility, "chroma " + chroma.str() + " must be a multiple of 8");
  }
}

template <typename T>
BoundModel<T>::BoundModel(Tape<T>& tape, const ModelParams& params, GradScope scope) : config_(params.config()) {
  for (const auto& [path, p] : params.entries()) {
    const bool grad = scope == GradScope::kAll || (scope == GradScope::kOnline && p.role == ParamRole::kOnline);
    if constexpr (std::is_same_v<T, float>) {
      vars_.emplace(path, tape.leaf(p.value, grad));
    } else {
      vars_.emplace(path, tape.leaf(p.value.template cast<T>(), grad));
    }
  }
}

template <typename T>
const Var<T>& BoundModel<T>::var(std::string_view path) const {
  auto it = vars_.find(path);
  if (it == vars_.end()) throw Error(ErrorCode::kInvalidArgument, "model has no parameter " + std::string(path));
  return it->second;
}

template <typename T>
void BoundModel<T>::bind(std::string_view path, const Var<T>& v) {
  auto it = vars_.find(path);
  if (it == vars_.end()) throw Error(ErrorCode::kInvalidArgument, "model has no parameter " + std::string(path));
  if (it->second.shape() != v.shape()) {
    throw Error(ErrorCode::kShapeMismatch, std::string(path) + " is " + it->second.shape().str() + ", got " + v.shape().str());
  }
  it->second = v;
}

template <typename T>
WideBlockVars<T> BoundModel<T>::wide_block(const std::string& prefix) const {
  return {{var(prefix + "conv1.w"), var(prefix + "conv1.b"), var(prefix + "conv2.w"), var(prefix + "conv2.b")},
          {var(prefix + "cab.fc1.w"), var(prefix + "cab.fc1.b"), var(prefix + "cab.fc2.w"), var(prefix + "cab.fc2.b")}};
}

template <typename T>
OnlineWideBlockVars<T> BoundModel<T>::online_block(const std::string& prefix) const {
  return {{var(prefix + "conv1.w"), var(prefix + "conv1.b"), var(prefix + "conv2.w"), var(prefix + "conv2.b")},
          var(prefix + "al.w")};
}

template <typename T>
Var<T> BoundModel<T>::branch(const Var<T>& x, const std::string& prefix) const {
  Var<T> h = conv2d(x, var(prefix + ".head.w"), std::optional<Var<T>>(var(prefix + ".head.b")), 1, 1);
  for (int i = 0; i < config_.n_wb_branch; ++i) h = wide_block_forward(h, wide_block(branch_block_prefix(prefix, i)));
  return h;
}

template <typename T>
Var<T> BoundModel<T>::features(const Var<T>& luma, const Var<T>& chroma) const {
  check_network_inputs(luma.shape(), chroma.shape());

  Var<T> spatial = add(branch(pixel_unshuffle(chroma, 2), "spatial.chroma"),
                       branch(pixel_unshuffle(luma, 4), "spatial.luma"));

  Var<T> freq = add(branch(dct_conv(chroma), "freq.chroma"), branch(dct_conv(avg_pool2(luma)), "freq.luma"));
  freq = conv2d(freq, var("freq.up.w"), std::optional<Var<T>>(var("freq.up.b")), 1, 1);
  freq = pixel_shuffle(freq, kFreqUpscale);

  Var<T> fused = concat_channels(spatial, freq);
  return conv2d(fused, var("fuse.w"), std::optional<Var<T>>(var("fuse.b")), 1, 1);
}

template <typename T>
Var<T> BoundModel<T>::reconstruct(const Var<T>& features, const Var<T>& chroma) const {
  Var<T> h = features;
  for (std::size_t i = 0; i < config_.recon_blocks.size(); ++i) {
    const std::string prefix = recon_prefix(i);
    h = config_.recon_blocks[i] == BlockKind::kOnlineWide ? olwb_forward(h, online_block(prefix))
                                                          : wide_block_forward(h, wide_block(prefix));
  }
  h = conv2d(h, var("tail.w"), std::optional<Var<T>>(var("tail.b")), 1, 1);
  h = pixel_shuffle(h, 2);
  if (h.shape() != chroma.shape()) {
    throw Error(ErrorCode::kShapeMismatch, "trunk output " + h.shape().str() + " vs chroma " + chroma.shape().str());
  }
  return add(h, chroma);
}

template class BoundModel<float>;
template class BoundModel<double>;

Tensor<float> oldn_forward(const ModelParams& params, const Tensor<float>& luma, const Tensor<float>& chroma) {
  Tape<float> tape;
  BoundModel<float> model(tape, params, GradScope::kNone);
  return model.forward(tape.leaf(luma), tape.leaf(chroma)).value();
}

}  // namespace oldn
