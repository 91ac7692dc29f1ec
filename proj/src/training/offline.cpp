#include "oldn/training/offline.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "oldn/training/adam.hpp"
#include "oldn/training/loss.hpp"

namespace oldn {
namespace {

void shuffle(std::vector<std::size_t>& order, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % i;
    std::uint64_t r;
    do r = rng(); while (r >= limit);
    std::swap(order[i - 1], order[r % i]);
  }
}

}  // namespace

void OfflineConfig::validate() const {
  model.validate();
  if (batch_size < 1) throw Error(ErrorCode::kConfig, "batch size must be positive");
  if (epochs < 0) throw Error(ErrorCode::kConfig, "epochs must be non-negative");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw Error(ErrorCode::kConfig, "learning rate must be positive");
  if (!(lr_final >= 0.0) || !std::isfinite(lr_final)) throw Error(ErrorCode::kConfig, "final learning rate must be >= 0");
}

Tensor<float> stack_batch(const std::vector<const Tensor<float>*>& items) {
  if (items.empty()) throw Error(ErrorCode::kEmptyInput, "empty batch");
  const Shape s = items.front()->shape();
  Tensor<float> out(Shape{static_cast<int>(items.size()), s.c, s.h, s.w});
  auto dst = out.data().begin();
  for (const Tensor<float>* t : items) {
    if (t->shape() != s) throw Error(ErrorCode::kShapeMismatch, "batch items " + s.str() + " vs " + t->shape().str());
    dst = std::copy(t->data().begin(), t->data().end(), dst);
  }
  return out;
}

OfflineResult train_offline(const Dataset& data, const OfflineConfig& config, const EpochLogger& log) {
  config.validate();
  ModelParams init = build_oldn(config.model, config.seed);
  if (config.zero_tail) {
    init.at("tail.w").value.fill(0.0f);
    init.at("tail.b").value.fill(0.0f);
  }
  return train_offline(data, config, std::move(init), log);
}

OfflineResult train_offline(const Dataset& data, const OfflineConfig& config, ModelParams init,
                            const EpochLogger& log) {
  config.validate();
  if (data.empty()) throw Error(ErrorCode::kEmptyInput, "offline training needs a non-empty dataset");

  OfflineResult result{std::move(init), {}};
  ModelParams& params = result.params;
  std::vector<std::string> paths;
  for (const auto& [path, p] : params.entries()) paths.push_back(path);

  AdamState adam;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  const std::size_t batch = static_cast<std::size_t>(config.batch_size);
  const std::size_t total_steps = static_cast<std::size_t>(config.epochs) * ((order.size() + batch - 1) / batch);
  std::size_t step = 0;
  auto step_size = [&] {
    if (config.lr_final <= 0.0 || total_steps < 2) return config.lr;
    const double t = static_cast<double>(step) / static_cast<double>(total_steps - 1);
    return config.lr_final + 0.5 * (config.lr - config.lr_final) * (1.0 + std::cos(std::numbers::pi * t));
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(order, config.seed + 1 + static_cast<std::uint64_t>(epoch));
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      std::vector<const Tensor<float>*> luma, chroma, target;
      for (std::size_t i = start; i < end; ++i) {
        const TrainingSample& s = data.samples[order[i]];
        luma.push_back(&s.luma);
        chroma.push_back(&s.chroma);
        target.push_back(&s.target);
      }

      Tape<float> tape;
      BoundModel<float> model(tape, params, GradScope::kAll);
      Var<float> pred = model.forward(tape.leaf(stack_batch(luma)), tape.leaf(stack_batch(chroma)));
      Var<float> loss = mse_loss(pred, tape.leaf(stack_batch(target)));
      tape.backward(loss);
      loss_sum += static_cast<double>(loss.value()[0]) * static_cast<double>(end - start);

      GradMap grads;
      for (const auto& path : paths) grads.emplace(path, model.var(path).grad());
      adam_step(params, paths, grads, adam, step_size());
      ++step;
    }
    const double mean = loss_sum / static_cast<double>(data.size());
    result.epoch_losses.push_back(mean);
    if (log) log(epoch, mean);
  }
  return result;
}

}  // namespace oldn
