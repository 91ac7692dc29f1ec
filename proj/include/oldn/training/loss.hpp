#pragma once

#include "oldn/tensor/tape.hpp"

namespace oldn {

// Mean of squared differences as a (1,1,1,1) node. Gradients flow into
// whichever operand requires them.
template <typename T>
Var<T> mse_loss(const Var<T>& pred, const Var<T>& target);

// Same quantity without a tape, accumulated in double.
template <typename T>
double mse(const Tensor<T>& a, const Tensor<T>& b);

}  // namespace oldn
