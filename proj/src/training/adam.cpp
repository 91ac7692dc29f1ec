#include "oldn/training/adam.hpp"

#include <cmath>

namespace oldn {

void adam_step(ModelParams& params, const std::vector<std::string>& paths, const GradMap& grads, AdamState& state,
               double lr) {
  // Validate everything first so a failed step leaves no partial update.
  for (const auto& path : paths) {
    auto it = grads.find(path);
    if (it == grads.end()) throw Error(ErrorCode::kMissingGradient, "no gradient for " + path);
    if (it->second.shape() != params.at(path).value.shape()) {
      throw Error(ErrorCode::kShapeMismatch, "gradient " + it->second.shape().str() + " for " + path);
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);

  for (const auto& path : paths) {
    Tensor<float>& w = params.at(path).value;
    const Tensor<float>& g = grads.find(path)->second;
    auto& m = state.m[path];
    auto& v = state.v[path];
    if (m.empty()) {
      m.assign(w.size(), 0.0);
      v.assign(w.size(), 0.0);
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = g[i];
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * gi;
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * gi * gi;
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      w[i] = static_cast<float>(static_cast<double>(w[i]) - lr * mhat / (std::sqrt(vhat) + state.eps));
    }
  }
}

}  // namespace oldn
