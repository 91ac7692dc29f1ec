#include "oldn/network/blocks.hpp"

namespace oldn {
namespace {

template <typename T>
Var<T> wide_branch(const Var<T>& x, const WideConvVars<T>& p) {
  const Shape& s = x.shape();
  const Shape& w1 = p.conv1_w.shape();
  const Shape& w2 = p.conv2_w.shape();
  if (w1.c != s.c || w2.b != s.c || w2.c != w1.b) {
    throw Error(ErrorCode::kShapeMismatch, "wide block convs " + w1.str() + " / " + w2.str() + " for input " + s.str());
  }
  Var<T> h = relu(conv2d(x, p.conv1_w, std::optional<Var<T>>(p.conv1_b), 1, 1));
  return conv2d(h, p.conv2_w, std::optional<Var<T>>(p.conv2_b), 1, 1);
}

}  // namespace

template <typename T>
Var<T> cab_forward(const Var<T>& x, const CabVars<T>& p) {
  const Shape& s = x.shape();
  if (p.fc1_w.shape().c != s.c || p.fc2_w.shape().b != s.c) {
    throw Error(ErrorCode::kShapeMismatch, "CAB dense layers " + p.fc1_w.shape().str() + " / " +
                                               p.fc2_w.shape().str() + " for input " + s.str());
  }
  Var<T> squeezed = global_avg_pool(x);
  Var<T> hidden = relu(dense(squeezed, p.fc1_w, p.fc1_b));
  Var<T> gates = sigmoid(dense(hidden, p.fc2_w, p.fc2_b));
  return channel_gate(x, gates);
}

template <typename T>
Var<T> adaptive_layer_forward(const Var<T>& x, const Var<T>& weights) {
  return channel_scale(x, weights);
}

template <typename T>
Var<T> wide_block_forward(const Var<T>& x, const WideBlockVars<T>& p) {
  return add(x, cab_forward(wide_branch(x, p.convs), p.cab));
}

template <typename T>
Var<T> olwb_forward(const Var<T>& x, const OnlineWideBlockVars<T>& p) {
  return add(x, adaptive_layer_forward(wide_branch(x, p.convs), p.al));
}

#define OLDN_INSTANTIATE(T)                                                 \
  template Var<T> cab_forward(const Var<T>&, const CabVars<T>&);            \
  template Var<T> adaptive_layer_forward(const Var<T>&, const Var<T>&);     \
  template Var<T> wide_block_forward(const Var<T>&, const WideBlockVars<T>&); \
  template Var<T> olwb_forward(const Var<T>&, const OnlineWideBlockVars<T>&);

OLDN_INSTANTIATE(float)
OLDN_INSTANTIATE(double)

#undef OLDN_INSTANTIATE

}  // namespace oldn
