#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "oldn/error.hpp"

namespace oldn {

// (batch, channels, height, width)
struct Shape {
  int b = 0;
  int c = 0;
  int h = 0;
  int w = 0;

  constexpr std::size_t numel() const noexcept {
    return static_cast<std::size_t>(b) * c * h * w;
  }
  constexpr std::size_t plane_size() const noexcept { return static_cast<std::size_t>(h) * w; }
  constexpr bool is_scalar() const noexcept { return b == 1 && c == 1 && h == 1 && w == 1; }
  constexpr bool positive() const noexcept { return b >= 1 && c >= 1 && h >= 1 && w >= 1; }

  friend constexpr bool operator==(const Shape&, const Shape&) = default;

  std::string str() const {
    return "(" + std::to_string(b) + "," + std::to_string(c) + "," + std::to_string(h) + "," +
           std::to_string(w) + ")";
  }
};

enum class Precision { kSingle, kDouble };

template <typename T>
constexpr Precision precision_of() noexcept {
  static_assert(std::is_same_v<T, float> || std::is_same_v<T, double>);
  return std::is_same_v<T, float> ? Precision::kSingle : Precision::kDouble;
}

// Dense row-major (B,C,H,W) array.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T(0)) : shape_(shape), data_(shape.numel(), fill) {
    if (shape.b < 0 || shape.c < 0 || shape.h < 0 || shape.w < 0) {
      throw Error(ErrorCode::kInvalidArgument, "negative dimension " + shape.str());
    }
  }
  Tensor(Shape shape, std::vector<T> data) : shape_(shape), data_(std::move(data)) {
    if (data_.size() != shape_.numel()) {
      throw Error(ErrorCode::kSizeMismatch, "data length " + std::to_string(data_.size()) +
                                                " does not match " + shape_.str());
    }
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }
  const std::vector<T>& vec() const noexcept { return data_; }

  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  std::size_t offset(int b, int c, int y, int x) const noexcept {
    return ((static_cast<std::size_t>(b) * shape_.c + c) * shape_.h + y) * shape_.w + x;
  }
  T& at(int b, int c, int y, int x) noexcept { return data_[offset(b, c, y, x)]; }
  const T& at(int b, int c, int y, int x) const noexcept { return data_[offset(b, c, y, x)]; }

  T* plane(int b, int c) noexcept { return data_.data() + offset(b, c, 0, 0); }
  const T* plane(int b, int c) const noexcept { return data_.data() + offset(b, c, 0, 0); }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  // Same data under a new shape with the same element count.
  Tensor reshaped(Shape shape) const {
    if (shape.numel() != shape_.numel()) {
      throw Error(ErrorCode::kShapeMismatch, "cannot reshape " + shape_.str() + " to " + shape.str());
    }
    return Tensor(shape, data_);
  }

  template <typename U>
  Tensor<U> cast() const {
    std::vector<U> out(data_.begin(), data_.end());
    return Tensor<U>(shape_, std::move(out));
  }

 private:
  Shape shape_{};
  std::vector<T> data_;
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

}  // namespace oldn
