#include "oldn/training/loss.hpp"

namespace oldn {
namespace {

void check_same(const Shape& a, const Shape& b) {
  if (a != b) throw Error(ErrorCode::kShapeMismatch, "mse operands " + a.str() + " vs " + b.str());
  if (a.numel() == 0) throw Error(ErrorCode::kEmptyInput, "mse of empty tensors");
}

}  // namespace

template <typename T>
double mse(const Tensor<T>& a, const Tensor<T>& b) {
  check_same(a.shape(), b.shape());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

template <typename T>
Var<T> mse_loss(const Var<T>& pred, const Var<T>& target) {
  check_same(pred.shape(), target.shape());
  Tape<T>& tape = pred.tape();
  const Tensor<T>& p = pred.value();
  const Tensor<T>& t = target.value();
  Tensor<T> out(Shape{1, 1, 1, 1});
  out[0] = static_cast<T>(mse(p, t));
  const int pid = pred.id(), tid = target.id();
  return tape.record(std::move(out), {pred, target}, [pid, tid](Tape<T>& tp, const Tensor<T>& g) {
    const Tensor<T>& pv = tp.value(pid);
    const Tensor<T>& tv = tp.value(tid);
    const T scale = static_cast<T>(2) * g[0] / static_cast<T>(pv.size());
    if (tp.requires_grad(pid)) {
      auto& gp = tp.grad_buffer(pid);
      for (std::size_t i = 0; i < pv.size(); ++i) gp[i] += scale * (pv[i] - tv[i]);
    }
    if (tp.requires_grad(tid)) {
      auto& gt = tp.grad_buffer(tid);
      for (std::size_t i = 0; i < pv.size(); ++i) gt[i] -= scale * (pv[i] - tv[i]);
    }
  });
}

template double mse(const Tensor<float>&, const Tensor<float>&);
template double mse(const Tensor<double>&, const Tensor<double>&);
template Var<float> mse_loss(const Var<float>&, const Var<float>&);
template Var<double> mse_loss(const Var<double>&, const Var<double>&);

}  // namespace oldn
