#include "oldn/tensor/tape.hpp"

#include <cmath>

namespace oldn {

template <typename T>
typename Tape<T>::Node& Tape<T>::node(int id) {
  if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) {
    throw Error(ErrorCode::kDanglingNode, "node id " + std::to_string(id) + " is not on this tape");
  }
  return nodes_[static_cast<std::size_t>(id)];
}

template <typename T>
const typename Tape<T>::Node& Tape<T>::node(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) {
    throw Error(ErrorCode::kDanglingNode, "node id " + std::to_string(id) + " is not on this tape");
  }
  return nodes_[static_cast<std::size_t>(id)];
}

template <typename T>
Var<T> Tape<T>::leaf(Tensor<T> value, bool requires_grad) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  nodes_.push_back(std::move(n));
  return Var<T>(this, static_cast<int>(nodes_.size() - 1));
}

template <typename T>
Var<T> Tape<T>::record(Tensor<T> value, std::initializer_list<Var<T>> inputs, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  for (const Var<T>& in : inputs) {
    if (&in.tape() != this) throw Error(ErrorCode::kDanglingNode, "input belongs to a different tape");
    node(in.id());
    n.inputs.push_back(in.id());
    n.requires_grad = n.requires_grad || requires_grad(in.id());
  }
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var<T>(this, static_cast<int>(nodes_.size() - 1));
}

template <typename T>
const Tensor<T>& Tape<T>::value(int id) const {
  return node(id).value;
}

template <typename T>
bool Tape<T>::requires_grad(int id) const {
  return node(id).requires_grad;
}

template <typename T>
const Tensor<T>* Tape<T>::grad(int id) const {
  const Node& n = node(id);
  return n.grad ? &*n.grad : nullptr;
}

template <typename T>
Tensor<T>& Tape<T>::grad_buffer(int id) {
  Node& n = node(id);
  if (!n.grad) n.grad.emplace(n.value.shape());
  return *n.grad;
}

template <typename T>
void Tape<T>::accumulate_grad(int id, const Tensor<T>& g) {
  Tensor<T>& buf = grad_buffer(id);
  if (buf.shape() != g.shape()) {
    throw Error(ErrorCode::kShapeMismatch, "gradient " + g.shape().str() + " for value " + buf.shape().str());
  }
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] += g[i];
}

template <typename T>
void Tape<T>::backward(const Var<T>& loss) {
  if (!loss.valid() || &loss.tape() != this) {
    throw Error(ErrorCode::kDanglingNode, "loss is not recorded on this tape");
  }
  const int root = loss.id();
  Node& root_node = node(root);
  if (!root_node.value.shape().is_scalar()) {
    throw Error(ErrorCode::kNonScalarLoss, "loss has shape " + root_node.value.shape().str());
  }
  for (Node& n : nodes_) n.grad.reset();
  if (!root_node.requires_grad) return;

  grad_buffer(root).fill(T(1));
  for (int id = root; id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.grad || !n.backward) continue;
    n.backward(*this, *n.grad);
  }
  // Leaves that need a gradient but were unreachable get an explicit zero.
  for (std::size_t id = 0; id <= static_cast<std::size_t>(root); ++id) {
    Node& n = nodes_[id];
    if (n.requires_grad && !n.grad) n.grad.emplace(n.value.shape());
  }
}

template <typename T>
void Tape<T>::note_kinks(std::span<const T> pre_activation) {
  if (!track_kinks_) return;
  std::uint64_t h = kink_hash_;
  for (const T v : pre_activation) {
    h ^= v > T(0) ? 0x9eu : 0x3bu;
    h *= 1099511628211ull;
  }
  kink_hash_ = h;
}

template class Tape<float>;
template class Tape<double>;

}  // namespace oldn
