#include "oldn/harness/selfcheck.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <random>

#include "oldn/freq/dct.hpp"
#include "oldn/network/model.hpp"
#include "oldn/tensor/gradcheck.hpp"
#include "oldn/training/loss.hpp"

namespace oldn {
namespace {

using TD = Tensor<double>;
using VD = Var<double>;

TD random_tensor(Shape s, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  TD t(s);
  for (double& v : t.data()) v = d(rng);
  return t;
}

// Values with magnitude in [0.1, 1] and random sign, away from ReLU kinks.
TD off_kink_tensor(Shape s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(0.1, 1.0);
  TD t(s);
  for (double& v : t.data()) v = (rng() & 1 ? 1.0 : -1.0) * d(rng);
  return t;
}

// Projects a graph output onto fixed random positive weights, so that
// every output element contributes with a distinct factor.
class Projection {
 public:
  explicit Projection(std::uint64_t seed) : seed_(seed), weights_(std::make_shared<std::optional<TD>>()) {}

  VD operator()(const VD& y) const {
    if (!*weights_) {
      std::mt19937_64 rng(seed_);
      *weights_ = random_tensor(y.shape(), rng, 0.5, 1.5);
    }
    return weighted_sum(y, **weights_);
  }

 private:
  std::uint64_t seed_;
  std::shared_ptr<std::optional<TD>> weights_;
};

struct Suite {
  double tolerance;
  std::uint64_t seed;
  std::vector<CheckResult> results;

  // f maps the probed leaf to a tensor-valued output.
  void check(const std::string& name, const TD& x, std::function<VD(const VD&)> f, std::size_t max_coords = 0) {
    Projection proj(seed + results.size());
    const ScalarGraph g = [f, proj](const VD& v) { return proj(f(v)); };
    const GradCheckReport r = finite_diff_check(g, x, GradCheckOptions{1e-4, max_coords, 3, seed + results.size()});
    results.push_back({name, r.max_rel_error, tolerance, r.max_rel_error <= tolerance});
  }
};

void op_cases(Suite& s, std::mt19937_64& rng) {
  const TD x = random_tensor({2, 3, 6, 6}, rng, -1, 1);
  const TD w = random_tensor({4, 3, 3, 3}, rng, -0.5, 0.5);
  const TD b = random_tensor({4, 1, 1, 1}, rng, -0.5, 0.5);
  s.check("conv2d dx (k3 s1 p1)", x, [&](const VD& v) {
    Tape<double>& t = v.tape();
    return conv2d(v, t.leaf(w), std::optional<VD>(t.leaf(b)), 1, 1);
  });
  const TD x7 = random_tensor({2, 3, 7, 7}, rng, -1, 1);
  s.check("conv2d dw (k3 s2 p1)", w, [&](const VD& v) {
    Tape<double>& t = v.tape();
    return conv2d(t.leaf(x7), v, std::optional<VD>(t.leaf(b)), 2, 1);
  });
  s.check("conv2d db", b, [&](const VD& v) {
    Tape<double>& t = v.tape();
    return conv2d(t.leaf(x), t.leaf(w), std::optional<VD>(v), 1, 0);
  });
  s.check("conv2d dx (k2 s2 p0)", x, [&](const VD& v) {
    const TD w2 = TD(Shape{2, 3, 2, 2}, std::vector<double>(24, 0.25));
    return conv2d(v, v.tape().leaf(w2), std::nullopt, 2, 0);
  });

  const TD xk = off_kink_tensor({2, 3, 4, 4}, rng);
  s.check("relu", xk, [](const VD& v) { return relu(v); });
  s.check("sigmoid", random_tensor({2, 3, 4, 4}, rng, -4, 4), [](const VD& v) { return sigmoid(v); });

  const TD y = random_tensor({2, 3, 6, 6}, rng, -1, 1);
  s.check("add", x, [&](const VD& v) { return add(v, v.tape().leaf(y)); });
  s.check("sub (subtrahend)", x, [&](const VD& v) { return sub(v.tape().leaf(y), v); });
  const TD z = random_tensor({2, 2, 6, 6}, rng, -1, 1);
  s.check("concat_channels (first)", x, [&](const VD& v) { return concat_channels(v, v.tape().leaf(z)); });
  s.check("concat_channels (second)", z, [&](const VD& v) { return concat_channels(v.tape().leaf(x), v); });

  const TD cs = random_tensor({3, 1, 1, 1}, rng, -2, 2);
  s.check("channel_scale dx", x, [&](const VD& v) { return channel_scale(v, v.tape().leaf(cs)); });
  s.check("channel_scale dw", cs, [&](const VD& v) { return channel_scale(v.tape().leaf(x), v); });
  const TD gate = random_tensor({2, 3, 1, 1}, rng, 0, 1);
  s.check("channel_gate dx", x, [&](const VD& v) { return channel_gate(v, v.tape().leaf(gate)); });
  s.check("channel_gate ds", gate, [&](const VD& v) { return channel_gate(v.tape().leaf(x), v); });
  s.check("global_avg_pool", x, [](const VD& v) { return global_avg_pool(v); });

  const TD dv = random_tensor({2, 6, 1, 1}, rng, -1, 1);
  const TD dw = random_tensor({4, 6, 1, 1}, rng, -1, 1);
  const TD db = random_tensor({4, 1, 1, 1}, rng, -1, 1);
  s.check("dense dv", dv, [&](const VD& v) { return dense(v, v.tape().leaf(dw), v.tape().leaf(db)); });
  s.check("dense dW", dw, [&](const VD& v) { return dense(v.tape().leaf(dv), v, v.tape().leaf(db)); });
  s.check("dense db", db, [&](const VD& v) { return dense(v.tape().leaf(dv), v.tape().leaf(dw), v); });

  s.check("pixel_unshuffle", random_tensor({2, 2, 8, 8}, rng, -1, 1), [](const VD& v) { return pixel_unshuffle(v, 2); });
  s.check("pixel_shuffle", random_tensor({2, 8, 3, 3}, rng, -1, 1), [](const VD& v) { return pixel_shuffle(v, 2); });
  s.check("avg_pool2", x, [](const VD& v) { return avg_pool2(v); });
  s.check("dct_conv", random_tensor({2, 1, 16, 16}, rng, 0, 1), [](const VD& v) { return dct_conv(v); });
  s.check("idct_conv", random_tensor({2, 64, 2, 2}, rng, -1, 1), [](const VD& v) { return idct_conv(v); });
  const TD target = random_tensor({2, 3, 6, 6}, rng, -1, 1);
  s.check("mse_loss", x, [&](const VD& v) { return mse_loss(v, v.tape().leaf(target)); });
}

void network_cases(Suite& s, std::mt19937_64& rng) {
  ModelConfig toy;
  toy.n = 8;
  ModelParams params = build_oldn(toy, s.seed);
  // Non-trivial biases and adaptive weights so no term is degenerate.
  std::uniform_real_distribution<double> small(-0.1, 0.1);
  for (auto& [path, p] : params.entries()) {
    if (path.ends_with(".b") || p.role == ParamRole::kOnline) {
      for (float& v : p.value.data()) v += static_cast<float>(small(rng));
    }
  }
  const TD luma = random_tensor({1, 1, 16, 16}, rng, 0, 1);
  const TD chroma = random_tensor({1, 1, 8, 8}, rng, 0, 1);

  auto forward = [params](const VD& l, const VD& c, const std::string& probe_path, const VD* probe) {
    BoundModel<double> m(l.tape(), params, GradScope::kNone);
    if (probe) m.bind(probe_path, *probe);
    return m.forward(l, c);
  };

  s.check("oldn toy d(chroma)", chroma, [&](const VD& v) { return forward(v.tape().leaf(luma), v, "", nullptr); });
  s.check("oldn toy d(luma)", luma, [&](const VD& v) { return forward(v, v.tape().leaf(chroma), "", nullptr); });
  for (const auto& [path, p] : params.entries()) {
    const TD value = p.value.cast<double>();
    const std::string name = path;
    s.check("oldn toy d(" + path + ")", value,
            [&, name](const VD& v) { return forward(v.tape().leaf(luma), v.tape().leaf(chroma), name, &v); }, 24);
  }
}

double naive_block_dct(const Tensor<float>& x, int b, int by, int bx, int u, int v) {
  const double pi = std::numbers::pi;
  const double cu = u == 0 ? std::sqrt(1.0 / 8) : std::sqrt(2.0 / 8);
  const double cv = v == 0 ? std::sqrt(1.0 / 8) : std::sqrt(2.0 / 8);
  double acc = 0.0;
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      acc += x.at(b, 0, by * 8 + i, bx * 8 + j) * std::cos((2 * i + 1) * u * pi / 16) * std::cos((2 * j + 1) * v * pi / 16);
    }
  }
  return cu * cv * acc;
}

}  // namespace

std::vector<CheckResult> run_gradient_suite(std::uint64_t seed, double tolerance) {
  Suite s{tolerance, seed, {}};
  std::mt19937_64 rng(seed);
  op_cases(s, rng);
  network_cases(s, rng);
  return s.results;
}

std::vector<CheckResult> run_transform_suite(std::uint64_t seed, int planes) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> d(0.0f, 1.0f);
  double roundtrip = 0.0, oracle = 0.0, parseval = 0.0, linearity = 0.0;
  for (int k = 0; k < planes; ++k) {
    Tensor<float> x(Shape{1, 1, 64, 64});
    Tensor<float> z(Shape{1, 1, 64, 64});
    for (float& v : x.data()) v = d(rng);
    for (float& v : z.data()) v = d(rng);
    const Tensor<float> y = dct_conv(x);
    const Tensor<float> back = idct_conv(y);
    double ex = 0.0, ey = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      roundtrip = std::max(roundtrip, static_cast<double>(std::abs(back[i] - x[i])));
      ex += static_cast<double>(x[i]) * x[i];
      ey += static_cast<double>(y[i]) * y[i];
    }
    parseval = std::max(parseval, std::abs(ex - ey) / ex);
    for (int by = 0; by < 8; ++by) {
      for (int bx = 0; bx < 8; ++bx) {
        for (int c = 0; c < 64; ++c) {
          oracle = std::max(oracle, std::abs(naive_block_dct(x, 0, by, bx, c / 8, c % 8) - y.at(0, c, by, bx)));
        }
      }
    }
    Tensor<float> mix(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) mix[i] = 0.75f * x[i] - 1.5f * z[i];
    const Tensor<float> ymix = dct_conv(mix);
    const Tensor<float> yz = dct_conv(z);
    for (std::size_t i = 0; i < y.size(); ++i) {
      linearity = std::max(linearity, std::abs(static_cast<double>(ymix[i]) - (0.75 * y[i] - 1.5 * yz[i])));
    }
  }

  const DctKernelBank& bank = default_dct_bank();
  double ortho = 0.0;
  for (int a = 0; a < 64; ++a) {
    for (int b = a; b < 64; ++b) {
      double dot = 0.0;
      for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) dot += bank.weight(a / 8, a % 8, i, j) * bank.weight(b / 8, b % 8, i, j);
      }
      ortho = std::max(ortho, std::abs(dot - (a == b ? 1.0 : 0.0)));
    }
  }

  return {
      {"idct_conv(dct_conv(x)) max abs error", roundtrip, 1e-5, roundtrip <= 1e-5},
      {"dct_conv vs direct block DCT-II max abs error", oracle, 1e-5, oracle <= 1e-5},
      {"Parseval max relative error", parseval, 1e-6, parseval <= 1e-6},
      {"linearity max abs error", linearity, 1e-5, linearity <= 1e-5},
      {"kernel orthonormality max deviation", ortho, 1e-12, ortho <= 1e-12},
  };
}

}  // namespace oldn
