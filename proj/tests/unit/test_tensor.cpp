#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <optional>

#include "oldn/tensor/gradcheck.hpp"
#include "oldn/tensor/ops.hpp"
#include "support/oracles.hpp"

namespace oldn {
namespace {

using TD = Tensor<double>;
using VD = Var<double>;

TD make(Shape s, std::vector<double> v) { return TD(s, std::move(v)); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no oldn::Error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(Tensor, DataLengthMustMatchShape) {
  EXPECT_EQ(code_of([] { TD(Shape{1, 1, 2, 2}, std::vector<double>(3)); }), ErrorCode::kSizeMismatch);
  TD t(Shape{2, 3, 4, 5});
  EXPECT_EQ(t.size(), 120u);
  t.at(1, 2, 3, 4) = 7;
  EXPECT_EQ(t[119], 7);
}

TEST(Conv2d, ScalarKernelScales) {
  Tape<double> tape;
  auto y = conv2d(tape.leaf(make({1, 1, 2, 2}, {1, 2, 3, 4})), tape.leaf(make({1, 1, 1, 1}, {2})), std::nullopt);
  EXPECT_EQ(y.value().vec(), (std::vector<double>{2, 4, 6, 8}));
}

TEST(Conv2d, IdentityKernelIsIdentity) {
  std::mt19937_64 rng(1);
  const TD x = oracle::random_tensor({2, 1, 5, 7}, rng);
  TD k(Shape{1, 1, 3, 3});
  k.at(0, 0, 1, 1) = 1;
  Tape<double> tape;
  auto y = conv2d(tape.leaf(x), tape.leaf(k), std::nullopt, 1, 1);
  EXPECT_EQ(y.value().vec(), x.vec());
}

TEST(Conv2d, StridedOnesKernelSumsBlock) {
  Tape<double> tape;
  auto y = conv2d(tape.leaf(make({1, 1, 2, 2}, {1, 2, 3, 4})), tape.leaf(TD(Shape{1, 1, 2, 2}, 1.0)), std::nullopt, 2);
  EXPECT_EQ(y.shape(), (Shape{1, 1, 1, 1}));
  EXPECT_EQ(y.value()[0], 10);
}

TEST(Conv2d, MatchesDirectOracle) {
  std::mt19937_64 rng(2);
  for (auto [stride, pad, k] : {std::tuple{1, 1, 3}, {2, 1, 3}, {1, 0, 1}, {3, 2, 5}}) {
    const int h = 13 - (13 + 2 * pad - k) % stride;
    const TD x = oracle::random_tensor({2, 3, h, h}, rng);
    const TD w = oracle::random_tensor({4, 3, k, k}, rng);
    const TD b = oracle::random_tensor({4, 1, 1, 1}, rng);
    Tape<double> tape;
    auto y = conv2d(tape.leaf(x), tape.leaf(w), std::optional<VD>(tape.leaf(b)), stride, pad);
    const TD ref = oracle::conv2d(x, w, b.vec(), stride, pad);
    ASSERT_EQ(y.shape(), ref.shape());
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(y.value()[i], ref[i], 1e-12);
  }
}

TEST(Conv2d, RejectsBadShapes) {
  Tape<double> tape;
  auto x = tape.leaf(TD(Shape{1, 2, 4, 4}));
  EXPECT_EQ(code_of([&] { conv2d(x, tape.leaf(TD(Shape{1, 3, 3, 3})), std::nullopt); }), ErrorCode::kShapeMismatch);
  EXPECT_EQ(code_of([&] { conv2d(x, tape.leaf(TD(Shape{1, 2, 5, 5})), std::nullopt); }), ErrorCode::kShapeMismatch);
  EXPECT_EQ(code_of([&] { conv2d(x, tape.leaf(TD(Shape{1, 2, 3, 3})), std::nullopt, 2, 0); }),
            ErrorCode::kDivisibility);
}

TEST(Conv2d, BitReproducible) {
  std::mt19937_64 rng(3);
  const auto x = oracle::random_tensor({2, 8, 16, 16}, rng).cast<float>();
  const auto w = oracle::random_tensor({16, 8, 3, 3}, rng).cast<float>();
  Tape<float> t1, t2;
  auto a = conv2d(t1.leaf(x), t1.leaf(w), std::nullopt, 1, 1).value().vec();
  auto b = conv2d(t2.leaf(x), t2.leaf(w), std::nullopt, 1, 1).value().vec();
  EXPECT_EQ(0, std::memcmp(a.data(), b.data(), a.size() * sizeof(float)));
}

TEST(Relu, ForwardAndSubgradient) {
  Tape<double> tape;
  auto x = tape.leaf(make({1, 1, 1, 3}, {-1, 0, 2}), true);
  auto y = relu(x);
  EXPECT_EQ(y.value().vec(), (std::vector<double>{0, 0, 2}));
  tape.backward(sum(y));
  EXPECT_EQ(x.grad().vec(), (std::vector<double>{0, 0, 1}));
}

TEST(Sigmoid, ValuesAndSaturation) {
  Tape<double> tape;
  auto x = tape.leaf(make({1, 1, 1, 4}, {0, 40, -40, -800}), true);
  auto y = sigmoid(x);
  EXPECT_EQ(y.value()[0], 0.5);
  EXPECT_NEAR(y.value()[1], 1.0, 1e-15);
  EXPECT_TRUE(std::isfinite(y.value()[2]));
  EXPECT_EQ(y.value()[3], 0.0);
  tape.backward(sum(y));
  EXPECT_DOUBLE_EQ(x.grad()[0], 0.25);
  const double fd = finite_diff_check([](const VD& v) { return sum(sigmoid(v)); }, make({1, 1, 1, 1}, {0}), 1e-4);
  EXPECT_LT(fd, 1e-6);
}

TEST(AddConcat, ShapesAndRouting) {
  std::mt19937_64 rng(4);
  Tape<double> tape;
  const TD xv = oracle::random_tensor({1, 2, 4, 4}, rng);
  auto x = tape.leaf(xv, true);
  auto zeros = tape.leaf(TD(Shape{1, 2, 4, 4}), true);
  auto s = add(x, zeros);
  EXPECT_EQ(s.value().vec(), xv.vec());
  tape.backward(sum(s));
  EXPECT_EQ(x.grad().vec(), std::vector<double>(32, 1.0));
  EXPECT_EQ(zeros.grad().vec(), std::vector<double>(32, 1.0));

  Tape<double> t2;
  auto c = concat_channels(t2.leaf(TD(Shape{1, 2, 4, 4}, 1.0)), t2.leaf(TD(Shape{1, 3, 4, 4}, 2.0)));
  EXPECT_EQ(c.shape(), (Shape{1, 5, 4, 4}));
  EXPECT_EQ(c.value().at(0, 1, 3, 3), 1.0);
  EXPECT_EQ(c.value().at(0, 2, 0, 0), 2.0);
  EXPECT_EQ(code_of([&] { add(t2.leaf(TD(Shape{1, 2, 4, 4})), t2.leaf(TD(Shape{1, 2, 4, 3}))); }),
            ErrorCode::kShapeMismatch);
  EXPECT_EQ(code_of([&] { concat_channels(t2.leaf(TD(Shape{1, 2, 4, 4})), t2.leaf(TD(Shape{2, 2, 4, 4}))); }),
            ErrorCode::kShapeMismatch);
}

TEST(ChannelScale, Examples) {
  std::mt19937_64 rng(5);
  const TD xv = oracle::random_tensor({2, 2, 3, 3}, rng);
  Tape<double> tape;
  EXPECT_EQ(channel_scale(tape.leaf(xv), tape.leaf(TD(Shape{2, 1, 1, 1}, 1.0))).value().vec(), xv.vec());
  auto y = channel_scale(tape.leaf(xv), tape.leaf(make({2, 1, 1, 1}, {2, 0})));
  for (int b = 0; b < 2; ++b)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        EXPECT_EQ(y.value().at(b, 0, i, j), 2 * xv.at(b, 0, i, j));
        EXPECT_EQ(y.value().at(b, 1, i, j), 0.0);
      }
  EXPECT_EQ(code_of([&] { channel_scale(tape.leaf(xv), tape.leaf(TD(Shape{3, 1, 1, 1}))); }),
            ErrorCode::kShapeMismatch);
}

TEST(ChannelScale, GradientOfAllOnesIsCount) {
  Tape<double> tape;
  auto w = tape.leaf(make({1, 1, 1, 1}, {0.7}), true);
  tape.backward(sum(channel_scale(tape.leaf(TD(Shape{1, 1, 2, 2}, 1.0)), w)));
  EXPECT_EQ(w.grad()[0], 4.0);
}

TEST(ChannelScale, WeightGradientMatchesOracle) {
  std::mt19937_64 rng(6);
  const TD x = oracle::random_tensor({2, 3, 4, 4}, rng);
  const TD proj = oracle::random_tensor({2, 3, 4, 4}, rng);
  const TD w = oracle::random_tensor({3, 1, 1, 1}, rng);
  Tape<double> tape;
  auto wv = tape.leaf(w, true);
  tape.backward(weighted_sum(channel_scale(tape.leaf(x), wv), proj));
  // independent: f(w) = Σ proj·x·w_c computed by hand
  auto f = [&](const TD& wt) {
    double s = 0;
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 3; ++c)
        for (int i = 0; i < 16; ++i) s += proj.at(b, c, i / 4, i % 4) * x.at(b, c, i / 4, i % 4) * wt[c];
    return s;
  };
  EXPECT_LT(oracle::max_rel_error(wv.grad(), oracle::numeric_gradient(f, w)), 1e-6);
}

TEST(GlobalAvgPool, MeanAndBackward) {
  Tape<double> tape;
  auto x = tape.leaf(make({1, 1, 2, 2}, {1, 3, 5, 7}), true);
  auto y = global_avg_pool(x);
  EXPECT_EQ(y.value()[0], 4.0);
  tape.backward(sum(y));
  EXPECT_EQ(x.grad().vec(), std::vector<double>(4, 0.25));
}

TEST(Dense, Examples) {
  Tape<double> tape;
  auto v = tape.leaf(make({1, 2, 1, 1}, {1, 2}));
  auto y = dense(v, tape.leaf(make({2, 2, 1, 1}, {1, 1, 1, -1})), tape.leaf(TD(Shape{2, 1, 1, 1})));
  EXPECT_EQ(y.value().vec(), (std::vector<double>{3, -1}));
  auto id = dense(v, tape.leaf(make({2, 2, 1, 1}, {1, 0, 0, 1})), tape.leaf(TD(Shape{2, 1, 1, 1})));
  EXPECT_EQ(id.value().vec(), (std::vector<double>{1, 2}));
  EXPECT_EQ(code_of([&] { dense(v, tape.leaf(TD(Shape{2, 3, 1, 1})), tape.leaf(TD(Shape{2, 1, 1, 1}))); }),
            ErrorCode::kShapeMismatch);
}

TEST(Dense, WeightGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  const TD v = oracle::random_tensor({3, 4, 1, 1}, rng);
  const TD b = oracle::random_tensor({2, 1, 1, 1}, rng);
  const TD w = oracle::random_tensor({2, 4, 1, 1}, rng);
  const TD proj = oracle::random_tensor({3, 2, 1, 1}, rng);
  const double err = finite_diff_check(
      [&](const VD& wv) { return weighted_sum(dense(wv.tape().leaf(v), wv, wv.tape().leaf(b)), proj); }, w, 1e-4);
  EXPECT_LT(err, 1e-6);
}

TEST(PixelShuffle, LayoutAndInverse) {
  Tape<double> tape;
  auto u = pixel_unshuffle(tape.leaf(make({1, 1, 2, 2}, {1, 2, 3, 4})), 2);
  EXPECT_EQ(u.shape(), (Shape{1, 4, 1, 1}));
  EXPECT_EQ(u.value().vec(), (std::vector<double>{1, 2, 3, 4}));
  EXPECT_EQ(pixel_unshuffle(tape.leaf(TD(Shape{1, 1, 4, 4})), 2).shape(), (Shape{1, 4, 2, 2}));

  std::mt19937_64 rng(8);
  const auto x = oracle::random_tensor({2, 3, 8, 12}, rng).cast<float>();
  Tape<float> tf;
  for (int r : {2, 4}) {
    auto back = pixel_shuffle(pixel_unshuffle(tf.leaf(x), r), r);
    EXPECT_EQ(0, std::memcmp(back.value().data().data(), x.data().data(), x.size() * sizeof(float)));
  }
  EXPECT_EQ(code_of([&] { pixel_unshuffle(tf.leaf(Tensor<float>(Shape{1, 1, 6, 5})), 2); }), ErrorCode::kDivisibility);
  EXPECT_EQ(code_of([&] { pixel_shuffle(tf.leaf(Tensor<float>(Shape{1, 6, 2, 2})), 2); }), ErrorCode::kDivisibility);
}

TEST(AvgPool2, ValuesAndBackward) {
  Tape<double> tape;
  auto x = tape.leaf(make({1, 1, 2, 2}, {1, 2, 3, 4}), true);
  auto y = avg_pool2(x);
  EXPECT_EQ(y.value()[0], 2.5);
  tape.backward(sum(y));
  EXPECT_EQ(x.grad().vec(), std::vector<double>(4, 0.25));
  EXPECT_EQ(avg_pool2(tape.leaf(TD(Shape{1, 2, 4, 6}, 3.0))).value().vec(), std::vector<double>(12, 3.0));
  EXPECT_EQ(code_of([&] { avg_pool2(tape.leaf(TD(Shape{1, 1, 3, 4}))); }), ErrorCode::kDivisibility);
}

TEST(Backward, SumGivesOnes) {
  Tape<double> tape;
  auto x = tape.leaf(TD(Shape{1, 2, 3, 3}, 0.5), true);
  tape.backward(sum(x));
  EXPECT_EQ(x.grad().vec(), std::vector<double>(18, 1.0));
}

TEST(Backward, Errors) {
  Tape<double> tape;
  auto x = tape.leaf(TD(Shape{1, 1, 2, 2}), true);
  EXPECT_EQ(code_of([&] { tape.backward(relu(x)); }), ErrorCode::kNonScalarLoss);
  Tape<double> other;
  auto y = sum(other.leaf(TD(Shape{1, 1, 2, 2}), true));
  EXPECT_EQ(code_of([&] { tape.backward(y); }), ErrorCode::kDanglingNode);
  EXPECT_EQ(code_of([&] { tape.backward(Var<double>()); }), ErrorCode::kDanglingNode);
}

TEST(Backward, CompositeMatchesFiniteDifferences) {
  std::mt19937_64 rng(9);
  const TD x = oracle::random_tensor({1, 2, 6, 6}, rng);
  const TD w = oracle::random_tensor({3, 2, 3, 3}, rng);
  const double err =
      finite_diff_check([&](const VD& v) { return sum(relu(conv2d(v, v.tape().leaf(w), std::nullopt, 1, 1))); }, x, 1e-4);
  EXPECT_LT(err, 1e-5);
}

// Central differences on a linear graph are exact up to roundoff.
TEST(FiniteDiff, LinearIsExact) {
  std::mt19937_64 rng(10);
  const TD x = oracle::random_tensor({1, 3, 4, 4}, rng);
  const TD proj = oracle::random_tensor({1, 3, 4, 4}, rng);
  EXPECT_LT(finite_diff_check([&](const VD& v) { return weighted_sum(v, proj); }, x, 1e-4), 1e-8);
}

TEST(FiniteDiff, ReluNetworkOffKinks) {
  std::mt19937_64 rng(11);
  TD x = oracle::random_tensor({1, 2, 5, 5}, rng);
  for (double& v : x.data()) v += v >= 0 ? 0.1 : -0.1;
  const TD w1 = oracle::random_tensor({4, 2, 3, 3}, rng);
  const TD w2 = oracle::random_tensor({2, 4, 3, 3}, rng);
  const double err = finite_diff_check(
      [&](const VD& v) {
        auto h = relu(conv2d(v, v.tape().leaf(w1), std::nullopt, 1, 1));
        return sum(relu(conv2d(h, v.tape().leaf(w2), std::nullopt, 1, 1)));
      },
      x, 1e-4);
  EXPECT_LT(err, 1e-5);
}

TEST(FiniteDiff, SampledCoordinates) {
  std::mt19937_64 rng(12);
  const TD x = oracle::random_tensor({1, 1, 10, 10}, rng);
  auto r = finite_diff_check([](const VD& v) { return sum(sigmoid(v)); }, x, GradCheckOptions{1e-4, 7, 3, 1});
  EXPECT_EQ(r.coords_checked, 7u);
  EXPECT_LT(r.max_rel_error, 1e-6);
}

}  // namespace
}  // namespace oldn
