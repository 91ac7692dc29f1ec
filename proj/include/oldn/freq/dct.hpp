#pragma once

#include "oldn/tensor/ops.hpp"

namespace oldn {

// The N² orthonormal DCT-II basis kernels. Output channel u·N+v of the
// forward bank holds the (u,v) kernel; channel 0 is DC.
class DctKernelBank {
 public:
  // Weights are evaluated in double precision from the DCT-II basis formula.
  explicit DctKernelBank(int block_size = 8);

  int block_size() const noexcept { return n_; }
  int channels() const noexcept { return n_ * n_; }

  // (N², 1, N, N): a stride-N convolution with these yields the block DCT.
  template <typename T>
  const Tensor<T>& forward() const;

  // (N², N², 1, 1): a 1×1 convolution whose output channel i·N+j holds pixel
  // (i,j) of each block, followed by pixel_shuffle(N). This is the transpose
  // of the forward map.
  template <typename T>
  const Tensor<T>& inverse() const;

  // Basis weight w_(i,j) of kernel F_(u,v).
  double weight(int u, int v, int i, int j) const;

 private:
  int n_;
  Tensor<double> forward_d_;
  Tensor<float> forward_f_;
  Tensor<double> inverse_d_;
  Tensor<float> inverse_f_;
};

template <>
const Tensor<double>& DctKernelBank::forward<double>() const;
template <>
const Tensor<float>& DctKernelBank::forward<float>() const;
template <>
const Tensor<double>& DctKernelBank::inverse<double>() const;
template <>
const Tensor<float>& DctKernelBank::inverse<float>() const;

// Bank with N = 8, built once.
const DctKernelBank& default_dct_bank();

// (B,1,H,W) → (B,N²,H/N,W/N); H and W must be multiples of N.
template <typename T>
Var<T> dct_conv(const Var<T>& x, const DctKernelBank& bank = default_dct_bank());

// (B,N²,h,w) → (B,1,h·N,w·N).
template <typename T>
Var<T> idct_conv(const Var<T>& y, const DctKernelBank& bank = default_dct_bank());

template <typename T>
Tensor<T> dct_conv(const Tensor<T>& x, const DctKernelBank& bank = default_dct_bank());

template <typename T>
Tensor<T> idct_conv(const Tensor<T>& y, const DctKernelBank& bank = default_dct_bank());

}  // namespace oldn
