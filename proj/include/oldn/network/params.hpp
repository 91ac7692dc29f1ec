#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "oldn/network/config.hpp"
#include "oldn/tensor/tensor.hpp"

namespace oldn {

enum class ParamRole {
  kFrozen,  // baseline weights, fixed during online learning
  kOnline,  // adaptive-layer weights
};

struct Parameter {
  Tensor<float> value;
  ParamRole role = ParamRole::kFrozen;
};

// All adaptive-layer weights, flattened in parameter-path order.
struct AlSnapshot {
  std::vector<float> weights;

  std::size_t size() const noexcept { return weights.size(); }
  friend bool operator==(const AlSnapshot&, const AlSnapshot&) = default;
};

// Named parameter store; iteration is always in sorted path order.
class ModelParams {
 public:
  using Map = std::map<std::string, Parameter, std::less<>>;

  ModelParams() = default;
  explicit ModelParams(ModelConfig config) : config_(std::move(config)) {}

  const ModelConfig& config() const noexcept { return config_; }

  void add(std::string path, Tensor<float> value, ParamRole role);
  bool contains(std::string_view path) const;
  const Parameter& at(std::string_view path) const;
  Parameter& at(std::string_view path);
  const Map& entries() const noexcept { return entries_; }
  Map& entries() noexcept { return entries_; }

  std::size_t scalar_count() const;
  std::size_t online_count() const;
  // Scalars under a path prefix such as "recon.00.".
  std::size_t scalar_count(std::string_view prefix) const;
  std::vector<std::string> online_paths() const;

  AlSnapshot al_snapshot() const;
  // Throws kSizeMismatch if the snapshot length differs from online_count().
  void set_al_snapshot(const AlSnapshot& snapshot);

  // Bitwise comparison of every frozen tensor.
  bool frozen_bits_equal(const ModelParams& other) const;

 private:
  ModelConfig config_;
  Map entries_;
};

}  // namespace oldn
