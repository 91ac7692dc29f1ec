#include "oldn/tensor/kernels.hpp"

#include <algorithm>
#include <cstring>
#include <vector>

namespace oldn::kernels {
namespace {

// C[m][n] += sum_k A[m][k] * B[k][n], k ascending for every element.
// A is M×K (row stride lda), B is K×N, C is M×N.
template <typename T>
void gemm_accumulate(int M, int K, int N, const T* A, int lda, const T* B, T* C) {
  constexpr int kRows = 4;
  constexpr int kChunk = 256;
  for (int n0 = 0; n0 < N; n0 += kChunk) {
    const int len = std::min(kChunk, N - n0);
    int m = 0;
    for (; m + kRows <= M; m += kRows) {
      T* c0 = C + static_cast<std::size_t>(m) * N + n0;
      T* c1 = c0 + N;
      T* c2 = c1 + N;
      T* c3 = c2 + N;
      const T* a = A + static_cast<std::size_t>(m) * lda;
      for (int k = 0; k < K; ++k) {
        const T a0 = a[k];
        const T a1 = a[lda + k];
        const T a2 = a[2 * lda + k];
        const T a3 = a[3 * lda + k];
        const T* b = B + static_cast<std::size_t>(k) * N + n0;
        for (int n = 0; n < len; ++n) {
          const T bv = b[n];
          c0[n] += a0 * bv;
          c1[n] += a1 * bv;
          c2[n] += a2 * bv;
          c3[n] += a3 * bv;
        }
      }
    }
    for (; m < M; ++m) {
      T* c = C + static_cast<std::size_t>(m) * N + n0;
      const T* a = A + static_cast<std::size_t>(m) * lda;
      for (int k = 0; k < K; ++k) {
        const T av = a[k];
        const T* b = B + static_cast<std::size_t>(k) * N + n0;
        for (int n = 0; n < len; ++n) c[n] += av * b[n];
      }
    }
  }
}

// Dot product with a fixed lane layout: lane l accumulates indices ≡ l mod kLanes,
// lanes are then summed in ascending order.
template <typename T>
T lane_dot(const T* a, const T* b, int n) {
  constexpr int kLanes = 16;
  T lanes[kLanes] = {};
  int i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    for (int l = 0; l < kLanes; ++l) lanes[l] += a[i + l] * b[i + l];
  }
  for (int l = 0; i < n; ++i, ++l) lanes[l] += a[i] * b[i];
  T sum = T(0);
  for (int l = 0; l < kLanes; ++l) sum += lanes[l];
  return sum;
}

// Expands one sample (Cin,H,W) into a (Cin·k·k) × (Ho·Wo) matrix, zero padded.
template <typename T>
void im2col(const T* x, int cin, int h, int w, int k, ConvGeometry g, int ho, int wo, T* col) {
  const std::size_t p = static_cast<std::size_t>(ho) * wo;
  for (int ci = 0; ci < cin; ++ci) {
    const T* plane = x + static_cast<std::size_t>(ci) * h * w;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        T* row = col + (static_cast<std::size_t>(ci) * k * k + ky * k + kx) * p;
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy * g.stride + ky - g.pad;
          T* out = row + static_cast<std::size_t>(oy) * wo;
          if (iy < 0 || iy >= h) {
            std::fill(out, out + wo, T(0));
            continue;
          }
          const T* in = plane + static_cast<std::size_t>(iy) * w;
          if (g.stride == 1) {
            const int shift = kx - g.pad;
            const int lo = std::max(0, -shift);
            const int hi = std::min(wo, w - shift);
            for (int ox = 0; ox < lo; ++ox) out[ox] = T(0);
            for (int ox = lo; ox < hi; ++ox) out[ox] = in[ox + shift];
            for (int ox = std::max(hi, lo); ox < wo; ++ox) out[ox] = T(0);
          } else {
            for (int ox = 0; ox < wo; ++ox) {
              const int ix = ox * g.stride + kx - g.pad;
              out[ox] = (ix >= 0 && ix < w) ? in[ix] : T(0);
            }
          }
        }
      }
    }
  }
}

// Inverse scatter of im2col: adds the (Cin·k·k) × P matrix back into (Cin,H,W).
// For each input element the (ky,kx) contributions are added in ascending order.
template <typename T>
void col2im_add(const T* col, int cin, int h, int w, int k, ConvGeometry g, int ho, int wo, T* x) {
  const std::size_t p = static_cast<std::size_t>(ho) * wo;
  for (int ci = 0; ci < cin; ++ci) {
    T* plane = x + static_cast<std::size_t>(ci) * h * w;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const T* row = col + (static_cast<std::size_t>(ci) * k * k + ky * k + kx) * p;
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy * g.stride + ky - g.pad;
          if (iy < 0 || iy >= h) continue;
          T* out = plane + static_cast<std::size_t>(iy) * w;
          const T* in = row + static_cast<std::size_t>(oy) * wo;
          if (g.stride == 1) {
            const int shift = kx - g.pad;
            const int lo = std::max(0, -shift);
            const int hi = std::min(wo, w - shift);
            for (int ox = lo; ox < hi; ++ox) out[ox + shift] += in[ox];
          } else {
            for (int ox = 0; ox < wo; ++ox) {
              const int ix = ox * g.stride + kx - g.pad;
              if (ix >= 0 && ix < w) out[ix] += in[ox];
            }
          }
        }
      }
    }
  }
}

bool is_pointwise(int k, ConvGeometry g) { return k == 1 && g.stride == 1 && g.pad == 0; }

}  // namespace

Shape conv2d_output_shape(const Shape& x, const Shape& w, ConvGeometry g) {
  if (!x.positive() || !w.positive()) {
    throw Error(ErrorCode::kInvalidArgument, "conv2d on empty tensor " + x.str() + " / " + w.str());
  }
  if (g.stride < 1 || g.pad < 0) {
    throw Error(ErrorCode::kInvalidArgument, "conv2d stride must be >= 1 and pad >= 0");
  }
  if (w.h != w.w) {
    throw Error(ErrorCode::kShapeMismatch, "conv2d kernel must be square, got " + w.str());
  }
  if (x.c != w.c) {
    throw Error(ErrorCode::kShapeMismatch,
                "conv2d input channels " + std::to_string(x.c) + " != kernel Cin " + std::to_string(w.c));
  }
  const int k = w.h;
  const int ph = x.h + 2 * g.pad;
  const int pw = x.w + 2 * g.pad;
  if (k > ph || k > pw) {
    throw Error(ErrorCode::kShapeMismatch, "kernel " + std::to_string(k) + " exceeds padded extent of " + x.str());
  }
  if ((ph - k) % g.stride != 0 || (pw - k) % g.stride != 0) {
    throw Error(ErrorCode::kDivisibility, "padded extent of " + x.str() + " not aligned to stride " +
                                              std::to_string(g.stride));
  }
  return {x.b, w.b, (ph - k) / g.stride + 1, (pw - k) / g.stride + 1};
}

template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const Tensor<T>& w, const std::type_identity_t<Tensor<T>>* bias,
                         ConvGeometry g) {
  const Shape os = conv2d_output_shape(x.shape(), w.shape(), g);
  const Shape& xs = x.shape();
  const int cout = os.c;
  const int k = w.shape().h;
  const int kdim = xs.c * k * k;
  const int p = os.h * os.w;
  if (bias != nullptr && static_cast<int>(bias->size()) != cout) {
    throw Error(ErrorCode::kShapeMismatch, "conv2d bias has " + std::to_string(bias->size()) +
                                               " values for " + std::to_string(cout) + " channels");
  }
  Tensor<T> out(os);
  const bool pointwise = is_pointwise(k, g);

#pragma omp parallel
  {
    std::vector<T> col(pointwise ? 0 : static_cast<std::size_t>(kdim) * p);
#pragma omp for schedule(static)
    for (int b = 0; b < xs.b; ++b) {
      T* o = out.plane(b, 0);
      for (int co = 0; co < cout; ++co) {
        const T bv = bias != nullptr ? (*bias)[co] : T(0);
        std::fill(o + static_cast<std::size_t>(co) * p, o + static_cast<std::size_t>(co + 1) * p, bv);
      }
      const T* src = x.plane(b, 0);
      if (!pointwise) {
        im2col(src, xs.c, xs.h, xs.w, k, g, os.h, os.w, col.data());
        src = col.data();
      }
      gemm_accumulate(cout, kdim, p, w.data().data(), kdim, src, o);
    }
  }
  return out;
}

template <typename T>
Tensor<T> conv2d_backward_input(const Tensor<T>& grad_out, const Tensor<T>& w, const Shape& x_shape,
                                ConvGeometry g) {
  const Shape os = conv2d_output_shape(x_shape, w.shape(), g);
  if (grad_out.shape() != os) {
    throw Error(ErrorCode::kShapeMismatch, "conv2d upstream gradient " + grad_out.shape().str());
  }
  const int cout = os.c;
  const int k = w.shape().h;
  const int kdim = x_shape.c * k * k;
  const int p = os.h * os.w;

  // W^T as a kdim × cout matrix.
  std::vector<T> wt(static_cast<std::size_t>(kdim) * cout);
  for (int co = 0; co < cout; ++co) {
    for (int j = 0; j < kdim; ++j) wt[static_cast<std::size_t>(j) * cout + co] = w[static_cast<std::size_t>(co) * kdim + j];
  }

  Tensor<T> gin(x_shape);
  const bool pointwise = is_pointwise(k, g);
#pragma omp parallel
  {
    std::vector<T> gcol(pointwise ? 0 : static_cast<std::size_t>(kdim) * p);
#pragma omp for schedule(static)
    for (int b = 0; b < x_shape.b; ++b) {
      const T* go = grad_out.plane(b, 0);
      if (pointwise) {
        gemm_accumulate(kdim, cout, p, wt.data(), cout, go, gin.plane(b, 0));
      } else {
        std::fill(gcol.begin(), gcol.end(), T(0));
        gemm_accumulate(kdim, cout, p, wt.data(), cout, go, gcol.data());
        col2im_add(gcol.data(), x_shape.c, x_shape.h, x_shape.w, k, g, os.h, os.w, gin.plane(b, 0));
      }
    }
  }
  return gin;
}

template <typename T>
Tensor<T> conv2d_backward_weight(const Tensor<T>& grad_out, const Tensor<T>& x, const Shape& w_shape,
                                 ConvGeometry g, Tensor<T>* bias_grad) {
  const Shape& xs = x.shape();
  const Shape os = conv2d_output_shape(xs, w_shape, g);
  if (grad_out.shape() != os) {
    throw Error(ErrorCode::kShapeMismatch, "conv2d upstream gradient " + grad_out.shape().str());
  }
  const int cout = os.c;
  const int k = w_shape.h;
  const int kdim = xs.c * k * k;
  const int p = os.h * os.w;
  const bool pointwise = is_pointwise(k, g);

  Tensor<T> gw(w_shape);
  std::vector<T> col(pointwise ? 0 : static_cast<std::size_t>(kdim) * p);
  // Batch is the outermost loop so each weight accumulates samples in order.
  for (int b = 0; b < xs.b; ++b) {
    const T* src = x.plane(b, 0);
    if (!pointwise) {
      im2col(src, xs.c, xs.h, xs.w, k, g, os.h, os.w, col.data());
      src = col.data();
    }
    const T* go = grad_out.plane(b, 0);
#pragma omp parallel for schedule(static)
    for (int co = 0; co < cout; ++co) {
      const T* grow = go + static_cast<std::size_t>(co) * p;
      T* wrow = gw.data().data() + static_cast<std::size_t>(co) * kdim;
      for (int j = 0; j < kdim; ++j) wrow[j] += lane_dot(grow, src + static_cast<std::size_t>(j) * p, p);
    }
  }

  if (bias_grad != nullptr) {
    *bias_grad = Tensor<T>(Shape{cout, 1, 1, 1});
    std::vector<T> ones(static_cast<std::size_t>(p), T(1));
    for (int b = 0; b < xs.b; ++b) {
      for (int co = 0; co < cout; ++co) {
        (*bias_grad)[co] += lane_dot(grad_out.plane(b, co), ones.data(), p);
      }
    }
  }
  return gw;
}

template <typename T>
Tensor<T> pixel_unshuffle(const Tensor<T>& x, int r) {
  const Shape& s = x.shape();
  if (r < 1) throw Error(ErrorCode::kInvalidArgument, "shuffle factor must be >= 1");
  if (s.h % r != 0 || s.w % r != 0) {
    throw Error(ErrorCode::kDivisibility, "pixel_unshuffle: " + s.str() + " not divisible by " + std::to_string(r));
  }
  const int ho = s.h / r;
  const int wo = s.w / r;
  Tensor<T> out(Shape{s.b, s.c * r * r, ho, wo});
  for (int b = 0; b < s.b; ++b) {
    for (int c = 0; c < s.c; ++c) {
      const T* in = x.plane(b, c);
      for (int dy = 0; dy < r; ++dy) {
        for (int dx = 0; dx < r; ++dx) {
          T* o = out.plane(b, c * r * r + dy * r + dx);
          for (int y = 0; y < ho; ++y) {
            const T* row = in + static_cast<std::size_t>(y * r + dy) * s.w + dx;
            for (int xx = 0; xx < wo; ++xx) o[y * wo + xx] = row[xx * r];
          }
        }
      }
    }
  }
  return out;
}

template <typename T>
Tensor<T> pixel_shuffle(const Tensor<T>& x, int r) {
  const Shape& s = x.shape();
  if (r < 1) throw Error(ErrorCode::kInvalidArgument, "shuffle factor must be >= 1");
  if (s.c % (r * r) != 0) {
    throw Error(ErrorCode::kDivisibility, "pixel_shuffle: channels of " + s.str() + " not divisible by " +
                                              std::to_string(r * r));
  }
  const int co = s.c / (r * r);
  const int ho = s.h * r;
  const int wo = s.w * r;
  Tensor<T> out(Shape{s.b, co, ho, wo});
  for (int b = 0; b < s.b; ++b) {
    for (int c = 0; c < co; ++c) {
      T* o = out.plane(b, c);
      for (int dy = 0; dy < r; ++dy) {
        for (int dx = 0; dx < r; ++dx) {
          const T* in = x.plane(b, c * r * r + dy * r + dx);
          for (int y = 0; y < s.h; ++y) {
            T* row = o + static_cast<std::size_t>(y * r + dy) * wo + dx;
            for (int xx = 0; xx < s.w; ++xx) row[xx * r] = in[y * s.w + xx];
          }
        }
      }
    }
  }
  return out;
}

template <typename T>
Tensor<T> avg_pool2(const Tensor<T>& x) {
  const Shape& s = x.shape();
  if (s.h % 2 != 0 || s.w % 2 != 0) {
    throw Error(ErrorCode::kDivisibility, "avg_pool2 requires even extent, got " + s.str());
  }
  Tensor<T> out(Shape{s.b, s.c, s.h / 2, s.w / 2});
  for (int b = 0; b < s.b; ++b) {
    for (int c = 0; c < s.c; ++c) {
      const T* in = x.plane(b, c);
      T* o = out.plane(b, c);
      for (int y = 0; y < s.h / 2; ++y) {
        const T* r0 = in + static_cast<std::size_t>(2 * y) * s.w;
        const T* r1 = r0 + s.w;
        for (int xx = 0; xx < s.w / 2; ++xx) {
          o[y * (s.w / 2) + xx] = (r0[2 * xx] + r0[2 * xx + 1] + r1[2 * xx] + r1[2 * xx + 1]) * T(0.25);
        }
      }
    }
  }
  return out;
}

template <typename T>
Tensor<T> avg_pool2_backward(const Tensor<T>& grad_out) {
  const Shape& s = grad_out.shape();
  Tensor<T> gin(Shape{s.b, s.c, s.h * 2, s.w * 2});
  for (int b = 0; b < s.b; ++b) {
    for (int c = 0; c < s.c; ++c) {
      const T* g = grad_out.plane(b, c);
      T* o = gin.plane(b, c);
      const int w2 = s.w * 2;
      for (int y = 0; y < s.h; ++y) {
        for (int xx = 0; xx < s.w; ++xx) {
          const T v = g[y * s.w + xx] * T(0.25);
          o[(2 * y) * w2 + 2 * xx] = v;
          o[(2 * y) * w2 + 2 * xx + 1] = v;
          o[(2 * y + 1) * w2 + 2 * xx] = v;
          o[(2 * y + 1) * w2 + 2 * xx + 1] = v;
        }
      }
    }
  }
  return gin;
}

template <typename T>
Tensor<T> global_avg_pool(const Tensor<T>& x) {
  const Shape& s = x.shape();
  if (s.h < 1 || s.w < 1) throw Error(ErrorCode::kInvalidArgument, "global_avg_pool on empty plane");
  Tensor<T> out(Shape{s.b, s.c, 1, 1});
  const int n = s.h * s.w;
  std::vector<T> ones(static_cast<std::size_t>(n), T(1));
  for (int b = 0; b < s.b; ++b) {
    for (int c = 0; c < s.c; ++c) out.at(b, c, 0, 0) = lane_dot(x.plane(b, c), ones.data(), n) / T(n);
  }
  return out;
}

template <typename T>
Tensor<T> dense_forward(const Tensor<T>& v, const Tensor<T>& w, const Tensor<T>& bias) {
  const Shape& vs = v.shape();
  const Shape& ws = w.shape();
  if (vs.h != 1 || vs.w != 1) throw Error(ErrorCode::kShapeMismatch, "dense input must be (B,C,1,1), got " + vs.str());
  if (ws.h != 1 || ws.w != 1 || ws.c != vs.c) {
    throw Error(ErrorCode::kShapeMismatch, "dense weight " + ws.str() + " incompatible with input " + vs.str());
  }
  if (static_cast<int>(bias.size()) != ws.b) {
    throw Error(ErrorCode::kShapeMismatch, "dense bias size " + std::to_string(bias.size()));
  }
  Tensor<T> out(Shape{vs.b, ws.b, 1, 1});
  for (int b = 0; b < vs.b; ++b) {
    for (int o = 0; o < ws.b; ++o) {
      T acc = bias[o];
      for (int c = 0; c < vs.c; ++c) acc += w[static_cast<std::size_t>(o) * ws.c + c] * v.at(b, c, 0, 0);
      out.at(b, o, 0, 0) = acc;
    }
  }
  return out;
}

#define OLDN_INSTANTIATE(T)                                                                              \
  template Tensor<T> conv2d_forward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>*, ConvGeometry);  \
  template Tensor<T> conv2d_backward_input(const Tensor<T>&, const Tensor<T>&, const Shape&, ConvGeometry); \
  template Tensor<T> conv2d_backward_weight(const Tensor<T>&, const Tensor<T>&, const Shape&, ConvGeometry, \
                                            Tensor<T>*);                                                  \
  template Tensor<T> pixel_unshuffle(const Tensor<T>&, int);                                              \
  template Tensor<T> pixel_shuffle(const Tensor<T>&, int);                                                \
  template Tensor<T> avg_pool2(const Tensor<T>&);                                                         \
  template Tensor<T> avg_pool2_backward(const Tensor<T>&);                                                \
  template Tensor<T> global_avg_pool(const Tensor<T>&);                                                   \
  template Tensor<T> dense_forward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);

OLDN_INSTANTIATE(float)
OLDN_INSTANTIATE(double)

#undef OLDN_INSTANTIATE

}  // namespace oldn::kernels
