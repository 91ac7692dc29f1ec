#include "oldn/tensor/ops.hpp"

#include <cmath>

namespace oldn {
namespace {

template <typename T>
void require_same_shape(const Var<T>& x, const Var<T>& y, const char* op) {
  if (x.shape() != y.shape()) {
    throw Error(ErrorCode::kShapeMismatch, std::string(op) + ": " + x.shape().str() + " vs " + y.shape().str());
  }
}

template <typename T>
T stable_sigmoid(T v) {
  if (v >= T(0)) return T(1) / (T(1) + std::exp(-v));
  const T e = std::exp(v);
  return e / (T(1) + e);
}

}  // namespace

template <typename T>
Var<T> conv2d(const Var<T>& x, const Var<T>& w, const std::optional<std::type_identity_t<Var<T>>>& bias, int stride,
              int pad) {
  const kernels::ConvGeometry g{stride, pad};
  Tensor<T> out = kernels::conv2d_forward(x.value(), w.value(), bias ? &bias->value() : nullptr, g);
  const int xi = x.id();
  const int wi = w.id();
  const int bi = bias ? bias->id() : -1;
  auto backward = [xi, wi, bi, g](Tape<T>& tape, const Tensor<T>& gout) {
    const Tensor<T>& xv = tape.value(xi);
    const Tensor<T>& wv = tape.value(wi);
    if (tape.requires_grad(xi)) {
      tape.accumulate_grad(xi, kernels::conv2d_backward_input(gout, wv, xv.shape(), g));
    }
    const bool want_w = tape.requires_grad(wi);
    const bool want_b = bi >= 0 && tape.requires_grad(bi);
    if (want_w || want_b) {
      Tensor<T> gb;
      Tensor<T> gw = kernels::conv2d_backward_weight(gout, xv, wv.shape(), g, want_b ? &gb : nullptr);
      if (want_w) tape.accumulate_grad(wi, gw);
      if (want_b) tape.accumulate_grad(bi, gb.reshaped(tape.value(bi).shape()));
    }
  };
  if (bias) return x.tape().record(std::move(out), {x, w, *bias}, backward);
  return x.tape().record(std::move(out), {x, w}, backward);
}

template <typename T>
Var<T> relu(const Var<T>& x) {
  const Tensor<T>& xv = x.value();
  x.tape().note_kinks(xv.data());
  Tensor<T> out(xv.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = xv[i] > T(0) ? xv[i] : T(0);
  const int xi = x.id();
  return x.tape().record(std::move(out), {x}, [xi](Tape<T>& tape, const Tensor<T>& gout) {
    const Tensor<T>& xv = tape.value(xi);
    Tensor<T>& gx = tape.grad_buffer(xi);
    for (std::size_t i = 0; i < xv.size(); ++i) {
      if (xv[i] > T(0)) gx[i] += gout[i];
    }
  });
}

template <typename T>
Var<T> sigmoid(const Var<T>& x) {
  const Tensor<T>& xv = x.value();
  Tensor<T> out(xv.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = stable_sigmoid(xv[i]);
  const int xi = x.id();
  return x.tape().record(std::move(out), {x}, [xi](Tape<T>& tape, const Tensor<T>& gout) {
    const Tensor<T>& xv = tape.value(xi);
    Tensor<T>& gx = tape.grad_buffer(xi);
    for (std::size_t i = 0; i < xv.size(); ++i) {
      const T s = stable_sigmoid(xv[i]);
      gx[i] += gout[i] * s * (T(1) - s);
    }
  });
}

template <typename T>
Var<T> add(const Var<T>& x, const Var<T>& y) {
  require_same_shape(x, y, "add");
  const Tensor<T>& a = x.value();
  const Tensor<T>& b = y.value();
  Tensor<T> out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  const int xi = x.id();
  const int yi = y.id();
  return x.tape().record(std::move(out), {x, y}, [xi, yi](Tape<T>& tape, const Tensor<T>& gout) {
    if (tape.requires_grad(xi)) tape.accumulate_grad(xi, gout);
    if (tape.requires_grad(yi)) tape.accumulate_grad(yi, gout);
  });
}

template <typename T>
Var<T> sub(const Var<T>& x, const Var<T>& y) {
  require_same_shape(x, y, "sub");
  const Tensor<T>& a = x.value();
  const Tensor<T>& b = y.value();
  Tensor<T> out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  const int xi = x.id();
  const int yi = y.id();
  return x.tape().record(std::move(out), {x, y}, [xi, yi](Tape<T>& tape, const Tensor<T>& gout) {
    if (tape.requires_grad(xi)) tape.accumulate_grad(xi, gout);
    if (tape.requires_grad(yi)) {
      Tensor<T>& gy = tape.grad_buffer(yi);
      for (std::size_t i = 0; i < gy.size(); ++i) gy[i] -= gout[i];
    }
  });
}

template <typename T>
Var<T> concat_channels(const Var<T>& x, const Var<T>& y) {
  const Shape& a = x.shape();
  const Shape& b = y.shape();
  if (a.b != b.b || a.h != b.h || a.w != b.w) {
    throw Error(ErrorCode::kShapeMismatch, "concat_channels: " + a.str() + " vs " + b.str());
  }
  Tensor<T> out(Shape{a.b, a.c + b.c, a.h, a.w});
  const std::size_t na = static_cast<std::size_t>(a.c) * a.plane_size();
  const std::size_t nb = static_cast<std::size_t>(b.c) * b.plane_size();
  for (int n = 0; n < a.b; ++n) {
    std::copy_n(x.value().plane(n, 0), na, out.plane(n, 0));
    std::copy_n(y.value().plane(n, 0), nb, out.plane(n, a.c));
  }
  const int xi = x.id();
  const int yi = y.id();
  return x.tape().record(std::move(out), {x, y}, [xi, yi, na, nb](Tape<T>& tape, const Tensor<T>& gout) {
    const int ca = tape.value(xi).shape().c;
    for (int pass = 0; pass < 2; ++pass) {
      const int id = pass == 0 ? xi : yi;
      if (!tape.requires_grad(id)) continue;
      Tensor<T>& g = tape.grad_buffer(id);
      const std::size_t len = pass == 0 ? na : nb;
      for (int n = 0; n < g.shape().b; ++n) {
        const T* src = gout.plane(n, pass == 0 ? 0 : ca);
        T* dst = g.plane(n, 0);
        for (std::size_t i = 0; i < len; ++i) dst[i] += src[i];
      }
    }
  });
}

template <typename T>
Var<T> channel_scale(const Var<T>& x, const Var<T>& w) {
  const Shape& s = x.shape();
  if (static_cast<int>(w.value().size()) != s.c) {
    throw Error(ErrorCode::kShapeMismatch, "channel_scale: " + std::to_string(w.value().size()) +
                                               " weights for " + std::to_string(s.c) + " channels");
  }
  const Tensor<T>& xv = x.value();
  const Tensor<T>& wv = w.value();
  Tensor<T> out(s);
  const std::size_t p = s.plane_size();
  for (int b = 0; b < s.b; ++b) {
    for (int c = 0; c < s.c; ++c) {
      const T* in = xv.plane(b, c);
      T* o = out.plane(b, c);
      const T k = wv[c];
      for (std::size_t i = 0; i < p; ++i) o[i] = in[i] * k;
    }
  }
  const int xi = x.id();
  const int wi = w.id();
  return x.tape().record(std::move(out), {x, w}, [xi, wi](Tape<T>& tape, const Tensor<T>& gout) {
    const Tensor<T>& xv = tape.value(xi);
    const Tensor<T>& wv = tape.value(wi);
    const Shape& s = xv.shape();
    const std::size_t p = s.plane_size();
    if (tape.requires_grad(xi)) {
      Tensor<T>& gx = tape.grad_buffer(xi);
      for (int b = 0; b < s.b; ++b) {
        for (int c = 0; c < s.c; ++c) {
          const T* g = gout.plane(b, c);
          T* d = gx.plane(b, c);
          for (std::size_t i = 0; i < p; ++i) d[i] += g[i] * wv[c];
        }
      }
    }
    if (tape.requires_grad(wi)) {
      Tensor<T>& gw = tape.grad_buffer(wi);
      for (int c = 0; c < s.c; ++c) {
        T acc = T(0);
        for (int b = 0; b < s.b; ++b) {
          const T* g = gout.plane(b, c);
          const T* in = xv.plane(b, c);
          for (std::size_t i = 0; i < p; ++i) acc += g[i] * in[i];
        }
        gw[c] += acc;
      }
    }
  });
}

template <typename T>
Var<T> channel_gate(const Var<T>& x, const Var<T>& s) {
  const Shape& xs = x.shape();
  const Shape& ss = s.shape();
  if (ss != Shape{xs.b, xs.c, 1, 1}) {
    throw Error(ErrorCode::kShapeMismatch, "channel_gate: gates " + ss.str() + " for input " + xs.str());
  }
  const Tensor<T>& xv = x.value();
  const Tensor<T>& sv = s.value();
  Tensor<T> out(xs);
  const std::size_t p = xs.plane_size();
  for (int b = 0; b < xs.b; ++b) {
    for (int c = 0; c < xs.c; ++c) {
      const T k = sv.at(b, c, 0, 0);
      const T* in = xv.plane(b, c);
      T* o = out.plane(b, c);
      for (std::size_t i = 0; i < p; ++i) o[i] = in[i] * k;
    }
  }
  const int xi = x.id();
  const int si = s.id();
  return x.tape().record(std::move(out), {x, s}, [xi, si](Tape<T>& tape, const Tensor<T>& gout) {
    const Tensor<T>& xv = tape.value(xi);
    const Tensor<T>& sv = tape.value(si);
    const Shape& xs = xv.shape();
    const std::size_t p = xs.plane_size();
    const bool want_x = tape.requires_grad(xi);
    const bool want_s = tape.requires_grad(si);
    for (int b = 0; b < xs.b; ++b) {
      for (int c = 0; c < xs.c; ++c) {
        const T* g = gout.plane(b, c);
        if (want_x) {
          T* d = tape.grad_buffer(xi).plane(b, c);
          const T k = sv.at(b, c, 0, 0);
          for (std::size_t i = 0; i < p; ++i) d[i] += g[i] * k;
        }
        if (want_s) {
          const T* in = xv.plane(b, c);
          T acc = T(0);
          for (std::size_t i = 0; i < p; ++i) acc += g[i] * in[i];
          tape.grad_buffer(si).at(b, c, 0, 0) += acc;
        }
      }
    }
  });
}

template <typename T>
Var<T> global_avg_pool(const Var<T>& x) {
  Tensor<T> out = kernels::global_avg_pool(x.value());
  const int xi = x.id();
  return x.tape().record(std::move(out), {x}, [xi](Tape<T>& tape, const Tensor<T>& gout) {
    Tensor<T>& gx = tape.grad_buffer(xi);
    const Shape& s = gx.shape();
    const std::size_t p = s.plane_size();
    const T inv = T(1) / T(p);
    for (int b = 0; b < s.b; ++b) {
      for (int c = 0; c < s.c; ++c) {
        const T v = gout.at(b, c, 0, 0) * inv;
        T* d = gx.plane(b, c);
        for (std::size_t i = 0; i < p; ++i) d[i] += v;
      }
    }
  });
}

template <typename T>
Var<T> dense(const Var<T>& v, const Var<T>& w, const Var<T>& bias) {
  Tensor<T> out = kernels::dense_forward(v.value(), w.value(), bias.value());
  const int vi = v.id();
  const int wi = w.id();
  const int bi = bias.id();
  return v.tape().record(std::move(out), {v, w, bias}, [vi, wi, bi](Tape<T>& tape, const Tensor<T>& gout) {
    const Tensor<T>& vv = tape.value(vi);
    const Tensor<T>& wv = tape.value(wi);
    const int batch = vv.shape().b;
    const int cin = vv.shape().c;
    const int cout = wv.shape().b;
    if (tape.requires_grad(vi)) {
      Tensor<T>& gv = tape.grad_buffer(vi);
      for (int b = 0; b < batch; ++b) {
        for (int c = 0; c < cin; ++c) {
          T acc = T(0);
          for (int o = 0; o < cout; ++o) acc += wv[static_cast<std::size_t>(o) * cin + c] * gout.at(b, o, 0, 0);
          gv.at(b, c, 0, 0) += acc;
        }
      }
    }
    if (tape.requires_grad(wi)) {
      Tensor<T>& gw = tape.grad_buffer(wi);
      for (int o = 0; o < cout; ++o) {
        for (int c = 0; c < cin; ++c) {
          T acc = T(0);
          for (int b = 0; b < batch; ++b) acc += gout.at(b, o, 0, 0) * vv.at(b, c, 0, 0);
          gw[static_cast<std::size_t>(o) * cin + c] += acc;
        }
      }
    }
    if (tape.requires_grad(bi)) {
      Tensor<T>& gb = tape.grad_buffer(bi);
      for (int o = 0; o < cout; ++o) {
        T acc = T(0);
        for (int b = 0; b < batch; ++b) acc += gout.at(b, o, 0, 0);
        gb[o] += acc;
      }
    }
  });
}

template <typename T>
Var<T> pixel_unshuffle(const Var<T>& x, int r) {
  Tensor<T> out = kernels::pixel_unshuffle(x.value(), r);
  const int xi = x.id();
  return x.tape().record(std::move(out), {x}, [xi, r](Tape<T>& tape, const Tensor<T>& gout) {
    tape.accumulate_grad(xi, kernels::pixel_shuffle(gout, r));
  });
}

template <typename T>
Var<T> pixel_shuffle(const Var<T>& x, int r) {
  Tensor<T> out = kernels::pixel_shuffle(x.value(), r);
  const int xi = x.id();
  return x.tape().record(std::move(out), {x}, [xi, r](Tape<T>& tape, const Tensor<T>& gout) {
    tape.accumulate_grad(xi, kernels::pixel_unshuffle(gout, r));
  });
}

template <typename T>
Var<T> avg_pool2(const Var<T>& x) {
  Tensor<T> out = kernels::avg_pool2(x.value());
  const int xi = x.id();
  return x.tape().record(std::move(out), {x}, [xi](Tape<T>& tape, const Tensor<T>& gout) {
    tape.accumulate_grad(xi, kernels::avg_pool2_backward(gout));
  });
}

template <typename T>
Var<T> sum(const Var<T>& x) {
  const Tensor<T>& xv = x.value();
  T acc = T(0);
  for (const T v : xv.data()) acc += v;
  Tensor<T> out(Shape{1, 1, 1, 1}, acc);
  const int xi = x.id();
  return x.tape().record(std::move(out), {x}, [xi](Tape<T>& tape, const Tensor<T>& gout) {
    Tensor<T>& gx = tape.grad_buffer(xi);
    const T g = gout[0];
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g;
  });
}

template <typename T>
Var<T> weighted_sum(const Var<T>& x, const Tensor<T>& weights) {
  const Tensor<T>& xv = x.value();
  if (weights.shape() != xv.shape()) {
    throw Error(ErrorCode::kShapeMismatch, "weighted_sum: " + weights.shape().str() + " vs " + xv.shape().str());
  }
  T acc = T(0);
  for (std::size_t i = 0; i < xv.size(); ++i) acc += xv[i] * weights[i];
  Tensor<T> out(Shape{1, 1, 1, 1}, acc);
  const int xi = x.id();
  return x.tape().record(std::move(out), {x}, [xi, weights](Tape<T>& tape, const Tensor<T>& gout) {
    Tensor<T>& gx = tape.grad_buffer(xi);
    const T g = gout[0];
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g * weights[i];
  });
}

#define OLDN_INSTANTIATE(T)                                                                          \
  template Var<T> conv2d(const Var<T>&, const Var<T>&, const std::optional<Var<T>>&, int, int);       \
  template Var<T> relu(const Var<T>&);                                                                \
  template Var<T> sigmoid(const Var<T>&);                                                             \
  template Var<T> add(const Var<T>&, const Var<T>&);                                                  \
  template Var<T> sub(const Var<T>&, const Var<T>&);                                                  \
  template Var<T> concat_channels(const Var<T>&, const Var<T>&);                                      \
  template Var<T> channel_scale(const Var<T>&, const Var<T>&);                                        \
  template Var<T> channel_gate(const Var<T>&, const Var<T>&);                                         \
  template Var<T> global_avg_pool(const Var<T>&);                                                     \
  template Var<T> dense(const Var<T>&, const Var<T>&, const Var<T>&);                                 \
  template Var<T> pixel_unshuffle(const Var<T>&, int);                                                \
  template Var<T> pixel_shuffle(const Var<T>&, int);                                                  \
  template Var<T> avg_pool2(const Var<T>&);                                                           \
  template Var<T> sum(const Var<T>&);                                                                 \
  template Var<T> weighted_sum(const Var<T>&, const Tensor<T>&);

OLDN_INSTANTIATE(float)
OLDN_INSTANTIATE(double)

#undef OLDN_INSTANTIATE

}  // namespace oldn
