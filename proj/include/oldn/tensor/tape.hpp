#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "oldn/tensor/tensor.hpp"

namespace oldn {

template <typename T>
class Tape;

// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape lives.
template <typename T>
class Var {
 public:
  Var() = default;
  Var(Tape<T>* tape, int id) : tape_(tape), id_(id) {}

  bool valid() const noexcept { return tape_ != nullptr; }
  Tape<T>& tape() const;
  int id() const noexcept { return id_; }

  const Tensor<T>& value() const;
  const Shape& shape() const { return value().shape(); }
  bool requires_grad() const;
  // Gradient after Tape::backward; throws kMissingGradient if none was produced.
  const Tensor<T>& grad() const;

 private:
  Tape<T>* tape_ = nullptr;
  int id_ = -1;
};

// Single-writer record of a forward computation. Node storage is a deque, so
// references returned by value() stay valid while further ops are recorded.
template <typename T>
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, const Tensor<T>& grad_out)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var<T> leaf(Tensor<T> value, bool requires_grad = false);

  // Records an op output. The node requires grad iff any input does; the
  // backward closure is dropped otherwise.
  Var<T> record(Tensor<T> value, std::initializer_list<Var<T>> inputs, BackwardFn backward);

  // Reverse-topological accumulation from a (1,1,1,1) loss node.
  void backward(const Var<T>& loss);

  std::size_t size() const noexcept { return nodes_.size(); }
  const Tensor<T>& value(int id) const;
  bool requires_grad(int id) const;
  const Tensor<T>* grad(int id) const;

  // Zero-initialized on first access; backward closures accumulate into it.
  Tensor<T>& grad_buffer(int id);
  void accumulate_grad(int id, const Tensor<T>& g);

  // Sign pattern of ReLU pre-activations, hashed. Used by the finite
  // difference checker to detect probes that cross a kink.
  void set_track_kinks(bool on) noexcept { track_kinks_ = on; }
  void note_kinks(std::span<const T> pre_activation);
  std::uint64_t kink_signature() const noexcept { return kink_hash_; }

 private:
  struct Node {
    Tensor<T> value;
    std::vector<int> inputs;
    BackwardFn backward;
    bool requires_grad = false;
    std::optional<Tensor<T>> grad;
  };

  Node& node(int id);
  const Node& node(int id) const;

  std::deque<Node> nodes_;
  bool track_kinks_ = false;
  std::uint64_t kink_hash_ = 1469598103934665603ull;
};

template <typename T>
Tape<T>& Var<T>::tape() const {
  if (tape_ == nullptr) throw Error(ErrorCode::kDanglingNode, "variable is not bound to a tape");
  return *tape_;
}

template <typename T>
const Tensor<T>& Var<T>::value() const {
  return tape().value(id_);
}

template <typename T>
bool Var<T>::requires_grad() const {
  return tape().requires_grad(id_);
}

template <typename T>
const Tensor<T>& Var<T>::grad() const {
  const Tensor<T>* g = tape().grad(id_);
  if (g == nullptr) throw Error(ErrorCode::kMissingGradient, "node " + std::to_string(id_) + " has no gradient");
  return *g;
}

extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace oldn
