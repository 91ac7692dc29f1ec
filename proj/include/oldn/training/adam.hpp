#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "oldn/network/params.hpp"

namespace oldn {

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::int64_t step = 0;
  // Moments per parameter path, created on first update.
  std::map<std::string, std::vector<double>, std::less<>> m;
  std::map<std::string, std::vector<double>, std::less<>> v;
};

using GradMap = std::map<std::string, Tensor<float>, std::less<>>;

// One bias-corrected Adam update of params[path] for every path in `paths`.
// Throws kMissingGradient when a path has no entry in grads and
// kShapeMismatch when a gradient does not match its parameter.
void adam_step(ModelParams& params, const std::vector<std::string>& paths, const GradMap& grads, AdamState& state,
               double lr);

}  // namespace oldn
