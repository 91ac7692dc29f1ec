#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "oldn/network/model.hpp"
#include "oldn/training/patches.hpp"

namespace oldn {

struct OfflineConfig {
  ModelConfig model;
  int batch_size = 64;
  double lr = 1e-4;
  // When positive, the step size follows a half cosine from lr down to
  // lr_final over all updates; otherwise it stays at lr.
  double lr_final = 0.0;
  int epochs = 20;
  // Zero the tail convolution of a freshly built model so that training
  // starts from the identity mapping on chroma.
  bool zero_tail = false;
  std::uint64_t seed = 0;  // initialization and shuffling

  void validate() const;
};

struct OfflineResult {
  ModelParams params;
  std::vector<double> epoch_losses;  // mean pre-update batch loss per epoch
};

using EpochLogger = std::function<void(int epoch, double mean_loss)>;

// Adam on every parameter, the adaptive layers included. Samples are
// reshuffled each epoch from the seed; the last batch may be short.
OfflineResult train_offline(const Dataset& data, const OfflineConfig& config, const EpochLogger& log = {});

// Continues from existing parameters instead of a fresh build.
OfflineResult train_offline(const Dataset& data, const OfflineConfig& config, ModelParams init,
                            const EpochLogger& log = {});

// Concatenates (1,1,h,w) tensors into (B,1,h,w).
Tensor<float> stack_batch(const std::vector<const Tensor<float>*>& items);

}  // namespace oldn
