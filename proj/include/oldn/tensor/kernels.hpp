#pragma once

// Tape-free numerical kernels. Every output element is produced by a single
// loop nest with a fixed reduction order, so results do not depend on thread
// count or vector width.

#include <type_traits>

#include "oldn/tensor/tensor.hpp"

namespace oldn::kernels {

struct ConvGeometry {
  int stride = 1;
  int pad = 0;
};

// Output shape of a k×k convolution; throws on channel or extent mismatch.
Shape conv2d_output_shape(const Shape& x, const Shape& w, ConvGeometry g);

template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const Tensor<T>& w, const std::type_identity_t<Tensor<T>>* bias,
                         ConvGeometry g);

template <typename T>
Tensor<T> conv2d_backward_input(const Tensor<T>& grad_out, const Tensor<T>& w, const Shape& x_shape,
                                ConvGeometry g);

// Returns dL/dw; when bias_grad is non-null it receives dL/db (shape (Cout,1,1,1)).
template <typename T>
Tensor<T> conv2d_backward_weight(const Tensor<T>& grad_out, const Tensor<T>& x, const Shape& w_shape,
                                 ConvGeometry g, Tensor<T>* bias_grad);

template <typename T>
Tensor<T> pixel_unshuffle(const Tensor<T>& x, int r);

template <typename T>
Tensor<T> pixel_shuffle(const Tensor<T>& x, int r);

template <typename T>
Tensor<T> avg_pool2(const Tensor<T>& x);

template <typename T>
Tensor<T> avg_pool2_backward(const Tensor<T>& grad_out);

template <typename T>
Tensor<T> global_avg_pool(const Tensor<T>& x);

// v: (B,C,1,1), w: (Cout,C,1,1), bias: Cout values.
template <typename T>
Tensor<T> dense_forward(const Tensor<T>& v, const Tensor<T>& w, const Tensor<T>& bias);

}  // namespace oldn::kernels
