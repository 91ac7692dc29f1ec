#pragma once

#include "oldn/tensor/ops.hpp"

namespace oldn {

// Squeeze-excitation style channel attention: pool → dense → ReLU → dense → sigmoid.
template <typename T>
struct CabVars {
  Var<T> fc1_w;  // (C/r, C, 1, 1)
  Var<T> fc1_b;
  Var<T> fc2_w;  // (C, C/r, 1, 1)
  Var<T> fc2_b;
};

template <typename T>
struct WideConvVars {
  Var<T> conv1_w;  // (n·expand, n, 3, 3)
  Var<T> conv1_b;
  Var<T> conv2_w;  // (n, n·expand, 3, 3)
  Var<T> conv2_b;
};

template <typename T>
struct WideBlockVars {
  WideConvVars<T> convs;
  CabVars<T> cab;
};

template <typename T>
struct OnlineWideBlockVars {
  WideConvVars<T> convs;
  Var<T> al;  // n per-channel weights
};

template <typename T>
Var<T> cab_forward(const Var<T>& x, const CabVars<T>& p);

template <typename T>
Var<T> adaptive_layer_forward(const Var<T>& x, const Var<T>& weights);

// y = x + CAB(conv3(ReLU(conv3(x))))
template <typename T>
Var<T> wide_block_forward(const Var<T>& x, const WideBlockVars<T>& p);

// y = x + AL(conv3(ReLU(conv3(x))))
template <typename T>
Var<T> olwb_forward(const Var<T>& x, const OnlineWideBlockVars<T>& p);

}  // namespace oldn
