#pragma once

// Differentiable operations recorded on a Tape. Shape errors are raised as
// oldn::Error before anything is recorded.

#include <optional>

#include "oldn/tensor/kernels.hpp"
#include "oldn/tensor/tape.hpp"

namespace oldn {

// Cross-correlation with zero padding. w: (Cout,Cin,k,k); bias: Cout values.
template <typename T>
Var<T> conv2d(const Var<T>& x, const Var<T>& w, const std::optional<std::type_identity_t<Var<T>>>& bias,
              int stride = 1, int pad = 0);

// ReLU; the subgradient at exactly 0 is 0.
template <typename T>
Var<T> relu(const Var<T>& x);

template <typename T>
Var<T> sigmoid(const Var<T>& x);

template <typename T>
Var<T> add(const Var<T>& x, const Var<T>& y);

template <typename T>
Var<T> sub(const Var<T>& x, const Var<T>& y);

// Output channels are x's followed by y's.
template <typename T>
Var<T> concat_channels(const Var<T>& x, const Var<T>& y);

// Channel i of every sample multiplied by w[i]; w may have any shape with C values.
template <typename T>
Var<T> channel_scale(const Var<T>& x, const Var<T>& w);

// x: (B,C,H,W), s: (B,C,1,1) — per-sample gates.
template <typename T>
Var<T> channel_gate(const Var<T>& x, const Var<T>& s);

template <typename T>
Var<T> global_avg_pool(const Var<T>& x);

// v: (B,C,1,1), w: (Cout,C,1,1), bias: Cout values.
template <typename T>
Var<T> dense(const Var<T>& v, const Var<T>& w, const Var<T>& bias);

template <typename T>
Var<T> pixel_unshuffle(const Var<T>& x, int r);

template <typename T>
Var<T> pixel_shuffle(const Var<T>& x, int r);

template <typename T>
Var<T> avg_pool2(const Var<T>& x);

// Sum of all elements as a (1,1,1,1) scalar.
template <typename T>
Var<T> sum(const Var<T>& x);

// Σ x·weights as a (1,1,1,1) scalar; the weights are constants.
template <typename T>
Var<T> weighted_sum(const Var<T>& x, const Tensor<T>& weights);

}  // namespace oldn
