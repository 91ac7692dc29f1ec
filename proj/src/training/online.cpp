#include "oldn/training/online.hpp"

#include <cmath>
#include <limits>

#include "oldn/training/adam.hpp"
#include "oldn/training/loss.hpp"
#include "oldn/training/patches.hpp"

namespace oldn {
namespace {

int round_up8(int v) { return (v + 7) / 8 * 8; }

struct Tile {
  Tensor<float> features;
  Tensor<float> chroma;
  Tensor<float> target;
  double weight = 0.0;  // share of the frame's samples
};

Tensor<float> slice(const Tensor<float>& t, int x, int y, int w, int h) {
  Tensor<float> out(Shape{1, 1, h, w});
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) out[static_cast<std::size_t>(r) * w + c] = t.at(0, 0, y + r, x + c);
  }
  return out;
}

std::vector<Tile> make_tiles(const ModelParams& params, const NetworkInput& in, const Tensor<float>& target,
                             int tile) {
  const int w = in.chroma.shape().w;
  const int h = in.chroma.shape().h;
  const double total = static_cast<double>(w) * h;
  std::vector<Tile> tiles;
  for (int y = 0; y < h; y += tile) {
    for (int x = 0; x < w; x += tile) {
      const int tw = std::min(tile, w - x);
      const int th = std::min(tile, h - y);
      Tile t;
      t.chroma = slice(in.chroma, x, y, tw, th);
      t.target = slice(target, x, y, tw, th);
      t.weight = static_cast<double>(tw) * th / total;
      Tape<float> tape;
      BoundModel<float> model(tape, params, GradScope::kNone);
      t.features = model.features(tape.leaf(slice(in.luma, 2 * x, 2 * y, 2 * tw, 2 * th)), tape.leaf(t.chroma)).value();
      tiles.push_back(std::move(t));
    }
  }
  return tiles;
}

// Frame loss and, if requested, its gradient for every adaptive layer.
double evaluate(const ModelParams& params, const std::vector<Tile>& tiles, const std::vector<std::string>& paths,
                GradMap* grads) {
  double loss = 0.0;
  if (grads != nullptr) {
    grads->clear();
    for (const auto& p : paths) grads->emplace(p, Tensor<float>(params.at(p).value.shape()));
  }
  for (const Tile& t : tiles) {
    Tape<float> tape;
    BoundModel<float> model(tape, params, grads ? GradScope::kOnline : GradScope::kNone);
    Var<float> pred = model.reconstruct(tape.leaf(t.features), tape.leaf(t.chroma));
    Var<float> l = mse_loss(pred, tape.leaf(t.target));
    loss += t.weight * static_cast<double>(l.value()[0]);
    if (grads == nullptr) continue;
    tape.backward(l);
    for (const auto& p : paths) {
      const Tensor<float>& g = model.var(p).grad();
      Tensor<float>& acc = grads->find(p)->second;
      for (std::size_t i = 0; i < g.size(); ++i) acc[i] += static_cast<float>(t.weight) * g[i];
    }
  }
  return loss;
}

}  // namespace

void OnlineConfig::validate() const {
  if (steps < 0) throw Error(ErrorCode::kConfig, "online steps must be non-negative");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw Error(ErrorCode::kConfig, "online learning rate must be positive");
  if (tile < 0 || tile % 8 != 0) throw Error(ErrorCode::kConfig, "online tile must be a non-negative multiple of 8");
}

NetworkInput make_network_input(const Plane& luma, const Plane& chroma) {
  if (chroma.width < 1 || chroma.height < 1 || luma.width != 2 * chroma.width || luma.height != 2 * chroma.height) {
    throw Error(ErrorCode::kShapeMismatch, "luma " + std::to_string(luma.width) + "x" + std::to_string(luma.height) +
                                               " is not twice chroma " + std::to_string(chroma.width) + "x" +
                                               std::to_string(chroma.height));
  }
  const int pw = round_up8(chroma.width);
  const int ph = round_up8(chroma.height);
  return {plane_to_tensor<float>(pad_plane(luma, 2 * pw, 2 * ph)), plane_to_tensor<float>(pad_plane(chroma, pw, ph)),
          chroma.width, chroma.height};
}

Plane enhance_chroma(const ModelParams& params, const Plane& luma, const Plane& chroma) {
  const NetworkInput in = make_network_input(luma, chroma);
  return crop_plane(tensor_to_plane(oldn_forward(params, in.luma, in.chroma)), in.width, in.height);
}

OnlineResult train_online(const ModelParams& baseline, const Plane& degraded_luma, const Plane& degraded_chroma,
                          const Plane& raw_chroma, const OnlineConfig& config) {
  config.validate();
  if (raw_chroma.width != degraded_chroma.width || raw_chroma.height != degraded_chroma.height) {
    throw Error(ErrorCode::kShapeMismatch, "raw and degraded chroma differ in size");
  }
  const NetworkInput in = make_network_input(degraded_luma, degraded_chroma);
  const Tensor<float> target = plane_to_tensor<float>(pad_plane(raw_chroma, in.chroma.shape().w, in.chroma.shape().h));

  int tile = config.tile;
  if (tile == 0) {
    tile = in.chroma.size() > kOnlineTileBudget ? kDefaultOnlineTile : std::max(in.chroma.shape().w, in.chroma.shape().h);
  }

  OnlineResult result;
  result.snapshot = baseline.al_snapshot();

  ModelParams work = baseline;
  const std::vector<Tile> tiles = make_tiles(work, in, target, tile);
  const std::vector<std::string> paths = work.online_paths();

  AdamState adam;
  GradMap grads;
  double best = std::numeric_limits<double>::infinity();
  AlSnapshot best_snapshot = result.snapshot;
  for (int step = 0; step <= config.steps; ++step) {
    const bool last = step == config.steps;
    const double loss = evaluate(work, tiles, paths, last ? nullptr : &grads);
    result.losses.push_back(loss);
    if (loss < best) {
      best = loss;
      best_snapshot = work.al_snapshot();
    }
    if (!last) adam_step(work, paths, grads, adam, config.lr);
  }

  result.initial_loss = result.losses.front();
  result.final_loss = result.losses.back();
  if (result.final_loss > result.initial_loss) {
    result.snapshot = best_snapshot;
    result.final_loss = best;
    result.safeguard_used = true;
  } else {
    result.snapshot = work.al_snapshot();
  }
  return result;
}

}  // namespace oldn
