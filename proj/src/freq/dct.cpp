#include "oldn/freq/dct.hpp"

#include <cmath>
#include <numbers>

namespace oldn {
namespace {

void check_spatial_input(const Shape& s, int n) {
  if (s.c != 1) throw Error(ErrorCode::kShapeMismatch, "dct_conv expects one channel, got " + s.str());
  if (s.h % n != 0 || s.w % n != 0) {
    throw Error(ErrorCode::kDivisibility, "dct_conv: " + s.str() + " not divisible by block size " + std::to_string(n));
  }
}

void check_spectral_input(const Shape& s, int channels) {
  if (s.c != channels) {
    throw Error(ErrorCode::kShapeMismatch,
                "idct_conv expects " + std::to_string(channels) + " channels, got " + s.str());
  }
}

}  // namespace

DctKernelBank::DctKernelBank(int block_size) : n_(block_size) {
  if (block_size < 1) throw Error(ErrorCode::kInvalidArgument, "DCT block size must be >= 1");
  const int n2 = n_ * n_;
  forward_d_ = Tensor<double>(Shape{n2, 1, n_, n_});
  inverse_d_ = Tensor<double>(Shape{n2, n2, 1, 1});
  for (int u = 0; u < n_; ++u) {
    for (int v = 0; v < n_; ++v) {
      const int c = u * n_ + v;
      for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
          const double w = weight(u, v, i, j);
          forward_d_.at(c, 0, i, j) = w;
          inverse_d_.at(i * n_ + j, c, 0, 0) = w;
        }
      }
    }
  }
  forward_f_ = forward_d_.cast<float>();
  inverse_f_ = inverse_d_.cast<float>();
}

double DctKernelBank::weight(int u, int v, int i, int j) const {
  const double n = n_;
  const double cu = u == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
  const double cv = v == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
  return cu * cv * std::cos((i + 0.5) * std::numbers::pi / n * u) * std::cos((j + 0.5) * std::numbers::pi / n * v);
}

template <>
const Tensor<double>& DctKernelBank::forward<double>() const {
  return forward_d_;
}
template <>
const Tensor<float>& DctKernelBank::forward<float>() const {
  return forward_f_;
}
template <>
const Tensor<double>& DctKernelBank::inverse<double>() const {
  return inverse_d_;
}
template <>
const Tensor<float>& DctKernelBank::inverse<float>() const {
  return inverse_f_;
}

const DctKernelBank& default_dct_bank() {
  static const DctKernelBank bank(8);
  return bank;
}

template <typename T>
Var<T> dct_conv(const Var<T>& x, const DctKernelBank& bank) {
  check_spatial_input(x.shape(), bank.block_size());
  Var<T> kernel = x.tape().leaf(bank.forward<T>(), false);
  return conv2d(x, kernel, std::nullopt, bank.block_size(), 0);
}

template <typename T>
Var<T> idct_conv(const Var<T>& y, const DctKernelBank& bank) {
  check_spectral_input(y.shape(), bank.channels());
  Var<T> kernel = y.tape().leaf(bank.inverse<T>(), false);
  return pixel_shuffle(conv2d(y, kernel, std::nullopt, 1, 0), bank.block_size());
}

template <typename T>
Tensor<T> dct_conv(const Tensor<T>& x, const DctKernelBank& bank) {
  check_spatial_input(x.shape(), bank.block_size());
  return kernels::conv2d_forward(x, bank.forward<T>(), nullptr, {bank.block_size(), 0});
}

template <typename T>
Tensor<T> idct_conv(const Tensor<T>& y, const DctKernelBank& bank) {
  check_spectral_input(y.shape(), bank.channels());
  return kernels::pixel_shuffle(kernels::conv2d_forward(y, bank.inverse<T>(), nullptr, {1, 0}), bank.block_size());
}

template Var<float> dct_conv(const Var<float>&, const DctKernelBank&);
template Var<double> dct_conv(const Var<double>&, const DctKernelBank&);
template Var<float> idct_conv(const Var<float>&, const DctKernelBank&);
template Var<double> idct_conv(const Var<double>&, const DctKernelBank&);
template Tensor<float> dct_conv(const Tensor<float>&, const DctKernelBank&);
template Tensor<double> dct_conv(const Tensor<double>&, const DctKernelBank&);
template Tensor<float> idct_conv(const Tensor<float>&, const DctKernelBank&);
template Tensor<double> idct_conv(const Tensor<double>&, const DctKernelBank&);

}  // namespace oldn
