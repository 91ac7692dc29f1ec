#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oldn/codec_sim/color.hpp"
#include "oldn/codec_sim/degrade.hpp"
#include "oldn/codec_sim/synthetic.hpp"
#include "oldn/tensor/gradcheck.hpp"
#include "oldn/training/adam.hpp"
#include "oldn/training/loss.hpp"
#include "oldn/training/offline.hpp"
#include "oldn/training/online.hpp"
#include "oldn/training/patches.hpp"
#include "support/oracles.hpp"

namespace oldn {
namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidArgument;
}

ModelConfig tiny() {
  ModelConfig c;
  c.n = 8;
  c.n_wb_branch = 1;
  return c;
}

struct FramePair {
  Yuv420Frame raw;
  Yuv420Frame degraded;
};

FramePair frame_pair(int w, int h, std::uint64_t seed, int qp) {
  FramePair f{rgb_to_yuv420(synthetic_image(w, h, seed)), {}};
  f.degraded = degrade_frame(f.raw, QpConfig(qp)).frame;
  return f;
}

TEST(MseLoss, ValueAndGradient) {
  Tape<double> t;
  auto p = t.leaf(Tensor<double>(Shape{1, 1, 1, 2}, std::vector<double>{1.0, 3.0}), true);
  auto q = t.leaf(Tensor<double>(Shape{1, 1, 1, 2}, std::vector<double>{0.0, 1.0}), true);
  auto l = mse_loss(p, q);
  EXPECT_DOUBLE_EQ(l.value()[0], 2.5);
  t.backward(l);
  EXPECT_DOUBLE_EQ(p.grad()[0], 1.0);
  EXPECT_DOUBLE_EQ(p.grad()[1], 2.0);
  EXPECT_DOUBLE_EQ(q.grad()[1], -2.0);

  std::mt19937_64 rng(1);
  const auto x = oracle::random_tensor({2, 1, 3, 3}, rng);
  const auto y = oracle::random_tensor({2, 1, 3, 3}, rng);
  EXPECT_LT(finite_diff_check([&](const Var<double>& v) { return mse_loss(v, v.tape().leaf(y)); }, x, 1e-5), 1e-6);
  EXPECT_NEAR(mse(x, y), [&] {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return s / double(x.size());
  }(), 1e-15);
}

TEST(MseLoss, Errors) {
  Tape<float> t;
  EXPECT_EQ(code_of([&] { mse_loss(t.leaf(Tensor<float>(Shape{1, 1, 2, 2})), t.leaf(Tensor<float>(Shape{1, 1, 2, 3}))); }),
            ErrorCode::kShapeMismatch);
  EXPECT_EQ(code_of([] { mse(Tensor<float>(Shape{0, 1, 1, 1}), Tensor<float>(Shape{0, 1, 1, 1})); }),
            ErrorCode::kEmptyInput);
}

ModelParams scalar_params(float v) {
  ModelParams p;
  p.add("w", Tensor<float>(Shape{1, 1, 1, 1}, v), ParamRole::kFrozen);
  return p;
}

TEST(Adam, FirstStepIsLearningRate) {
  ModelParams p = scalar_params(0.0f);
  AdamState s;
  GradMap g;
  g.emplace("w", Tensor<float>(Shape{1, 1, 1, 1}, 1.0f));
  adam_step(p, {"w"}, g, s, 0.1);
  EXPECT_NEAR(p.at("w").value[0], -0.1, 1e-6);
  EXPECT_EQ(s.step, 1);
}

TEST(Adam, MatchesHandWrittenRecurrence) {
  ModelParams p = scalar_params(0.5f);
  AdamState s;
  double w = 0.5, m = 0, v = 0;
  const double grads[] = {0.3, -1.2, 0.05, 2.0, -0.7};
  for (int k = 0; k < 5; ++k) {
    GradMap g;
    g.emplace("w", Tensor<float>(Shape{1, 1, 1, 1}, static_cast<float>(grads[k])));
    adam_step(p, {"w"}, g, s, 0.01);
    const double gk = static_cast<float>(grads[k]);
    m = 0.9 * m + 0.1 * gk;
    v = 0.999 * v + 0.001 * gk * gk;
    const double mh = m / (1 - std::pow(0.9, k + 1)), vh = v / (1 - std::pow(0.999, k + 1));
    w -= 0.01 * mh / (std::sqrt(vh) + 1e-8);
    EXPECT_NEAR(p.at("w").value[0], w, 1e-6) << "step " << k;
  }
}

TEST(Adam, ValidatesBeforeUpdating) {
  ModelParams p = scalar_params(1.0f);
  p.add("u", Tensor<float>(Shape{2, 1, 1, 1}), ParamRole::kFrozen);
  AdamState s;
  GradMap g;
  g.emplace("w", Tensor<float>(Shape{1, 1, 1, 1}, 1.0f));
  EXPECT_EQ(code_of([&] { adam_step(p, {"w", "u"}, g, s, 0.1); }), ErrorCode::kMissingGradient);
  EXPECT_EQ(p.at("w").value[0], 1.0f);
  g.emplace("u", Tensor<float>(Shape{3, 1, 1, 1}));
  EXPECT_EQ(code_of([&] { adam_step(p, {"w", "u"}, g, s, 0.1); }), ErrorCode::kShapeMismatch);
  EXPECT_EQ(p.at("w").value[0], 1.0f);
  EXPECT_EQ(s.step, 0);
}

TEST(Patches, OriginsFitAndAreDeterministic) {
  const auto a = sample_patch_origins(80, 48, 50, 3);
  EXPECT_EQ(a, sample_patch_origins(80, 48, 50, 3));
  EXPECT_NE(a, sample_patch_origins(80, 48, 50, 4));
  for (const auto& o : a) {
    EXPECT_GE(o.x, 0);
    EXPECT_LE(o.x + kChromaPatch, 80);
    EXPECT_LE(o.y + kChromaPatch, 48);
  }
}

TEST(Patches, LumaIsColocated) {
  const FramePair f = frame_pair(128, 96, 2, 27);
  const auto pairs = extract_patches(f.raw.y, f.raw.u, 4, 7);
  ASSERT_EQ(pairs.size(), 4u);
  for (const auto& p : pairs) {
    EXPECT_EQ(p.luma.width, kLumaPatch);
    EXPECT_EQ(p.chroma.width, kChromaPatch);
    EXPECT_EQ(p.luma.at(5, 9), f.raw.y.at(p.origin.luma_x() + 5, p.origin.luma_y() + 9));
    EXPECT_EQ(p.chroma.at(3, 1), f.raw.u.at(p.origin.x + 3, p.origin.y + 1));
  }
  EXPECT_EQ(code_of([&] { extract_patches(f.raw.y, f.raw.y, 1, 0); }), ErrorCode::kShapeMismatch);
  EXPECT_EQ(code_of([&] { extract_patches(f.raw.y, f.raw.u, 1, 0, 64); }), ErrorCode::kInvalidArgument);
}

TEST(Patches, FramePatchesTakeBothChromaPlanes) {
  const FramePair f = frame_pair(96, 96, 3, 32);
  Dataset ds;
  append_frame_patches(ds, f.raw, f.degraded, 3, 11);
  ASSERT_EQ(ds.size(), 6u);
  for (const auto& s : ds.samples) {
    EXPECT_EQ(s.luma.shape(), (Shape{1, 1, 64, 64}));
    EXPECT_EQ(s.chroma.shape(), (Shape{1, 1, 32, 32}));
    EXPECT_EQ(s.target.shape(), (Shape{1, 1, 32, 32}));
    for (float v : s.target.data()) EXPECT_TRUE(v >= 0.0f && v <= 1.0f);
  }
}

TEST(Manifest, Parsing) {
  const auto e = parse_manifest("# list\na.ppm 22\n\n/abs/b.pgm,37\n  c.ppm   27  # trailing\n", "/data");
  ASSERT_EQ(e.size(), 3u);
  EXPECT_EQ(e[0].path, std::filesystem::path("/data/a.ppm"));
  EXPECT_EQ(e[0].qp, 22);
  EXPECT_EQ(e[1].path, std::filesystem::path("/abs/b.pgm"));
  EXPECT_EQ(e[1].qp, 37);
  EXPECT_EQ(e[2].qp, 27);
  EXPECT_EQ(code_of([] { parse_manifest("a.ppm\n", "."); }), ErrorCode::kConfig);
  EXPECT_EQ(code_of([] { parse_manifest("a.ppm 99\n", "."); }), ErrorCode::kConfig);
  EXPECT_EQ(code_of([] { parse_manifest("a.ppm x\n", "."); }), ErrorCode::kConfig);
}

Dataset small_dataset(int frames, int per_plane) {
  Dataset ds;
  for (int i = 0; i < frames; ++i) {
    const FramePair f = frame_pair(96, 96, 100 + i, 27);
    append_frame_patches(ds, f.raw, f.degraded, per_plane, 200 + i);
  }
  return ds;
}

TEST(Offline, SingleSampleEpochReducesLoss) {
  Dataset ds = small_dataset(1, 1);
  ds.samples.resize(1);
  OfflineConfig cfg;
  cfg.model = tiny();
  cfg.epochs = 1;
  const ModelParams init = build_oldn(cfg.model, cfg.seed);
  const auto& s = ds.samples[0];
  const double before = mse(oldn_forward(init, s.luma, s.chroma), s.target);
  const OfflineResult r = train_offline(ds, cfg);
  EXPECT_LT(mse(oldn_forward(r.params, s.luma, s.chroma), s.target), before);
}

TEST(Offline, DeterministicFiniteAndDescending) {
  const Dataset ds = small_dataset(2, 4);
  OfflineConfig cfg;
  cfg.model = tiny();
  cfg.batch_size = 4;
  cfg.lr = 1e-3;
  cfg.epochs = 4;
  std::vector<double> logged;
  const OfflineResult a = train_offline(ds, cfg, [&](int, double l) { logged.push_back(l); });
  const OfflineResult b = train_offline(ds, cfg);
  EXPECT_TRUE(a.params.frozen_bits_equal(b.params));
  EXPECT_EQ(a.params.al_snapshot(), b.params.al_snapshot());
  EXPECT_EQ(a.epoch_losses, logged);
  ASSERT_EQ(a.epoch_losses.size(), 4u);
  for (double l : a.epoch_losses) EXPECT_TRUE(std::isfinite(l));
  EXPECT_LT(a.epoch_losses.back(), a.epoch_losses.front());
}

TEST(Offline, CosineScheduleChangesTrajectory) {
  const Dataset ds = small_dataset(1, 4);
  OfflineConfig cfg;
  cfg.model = tiny();
  cfg.batch_size = 4;
  cfg.lr = 1e-3;
  cfg.epochs = 2;
  const OfflineResult flat = train_offline(ds, cfg);
  cfg.lr_final = 1e-5;
  const OfflineResult decayed = train_offline(ds, cfg);
  EXPECT_EQ(flat.epoch_losses.front(), decayed.epoch_losses.front());
  EXPECT_FALSE(flat.params.frozen_bits_equal(decayed.params));
}

TEST(Offline, ZeroTailStartsAtIdentity) {
  const Dataset ds = small_dataset(1, 2);
  OfflineConfig cfg;
  cfg.model = tiny();
  cfg.batch_size = 4;
  cfg.epochs = 1;
  cfg.zero_tail = true;
  double identity = 0;
  for (const auto& s : ds.samples) identity += mse(s.chroma, s.target);
  identity /= double(ds.size());
  // a single batch, so the logged loss is the pre-update loss
  const OfflineResult r = train_offline(ds, cfg);
  EXPECT_NEAR(r.epoch_losses.front(), identity, 1e-9);
  const ModelParams fresh = build_oldn(cfg.model, cfg.seed);
  EXPECT_NE(r.params.at("tail.w").value.vec(), fresh.at("tail.w").value.vec());
}

TEST(Offline, Errors) {
  OfflineConfig cfg;
  cfg.model = tiny();
  EXPECT_EQ(code_of([&] { train_offline(Dataset{}, cfg); }), ErrorCode::kEmptyInput);
  cfg.batch_size = 0;
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::kConfig);
  cfg.batch_size = 1;
  cfg.lr = -1;
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::kConfig);
}

class Online : public ::testing::Test {
 protected:
  FramePair f = frame_pair(64, 48, 5, 37);
  ModelParams base = build_oldn(tiny(), 9);
};

TEST_F(Online, ZeroStepsReturnBaseline) {
  OnlineConfig cfg;
  cfg.steps = 0;
  const OnlineResult r = train_online(base, f.degraded.y, f.degraded.u, f.raw.u, cfg);
  EXPECT_EQ(r.snapshot, base.al_snapshot());
  ASSERT_EQ(r.losses.size(), 1u);
  EXPECT_EQ(r.initial_loss, r.final_loss);
  EXPECT_FALSE(r.safeguard_used);
}

TEST_F(Online, NeverWorseAndBaselineUntouched) {
  const ModelParams copy = base;
  for (double lr : {1e-3, 1e-2, 1.0}) {
    OnlineConfig cfg;
    cfg.steps = 10;
    cfg.lr = lr;
    const OnlineResult r = train_online(base, f.degraded.y, f.degraded.v, f.raw.v, cfg);
    EXPECT_EQ(r.losses.size(), 11u);
    EXPECT_LE(r.final_loss, r.initial_loss) << "lr " << lr;
    EXPECT_EQ(r.initial_loss, r.losses.front());
    EXPECT_EQ(r.snapshot.size(), base.online_count());
  }
  EXPECT_TRUE(base.frozen_bits_equal(copy));
  EXPECT_EQ(base.al_snapshot(), copy.al_snapshot());
}

TEST_F(Online, FinalLossIsReturnedSnapshotLoss) {
  OnlineConfig cfg;
  cfg.steps = 5;
  const OnlineResult r = train_online(base, f.degraded.y, f.degraded.u, f.raw.u, cfg);
  ModelParams tuned = base;
  tuned.set_al_snapshot(r.snapshot);
  const NetworkInput in = make_network_input(f.degraded.y, f.degraded.u);
  const NetworkInput target = make_network_input(f.raw.y, f.raw.u);
  const double direct = mse(oldn_forward(tuned, in.luma, in.chroma), target.chroma);
  EXPECT_NEAR(direct, r.final_loss, 1e-6 * direct);
}

TEST_F(Online, TilingKeepsContract) {
  OnlineConfig cfg;
  cfg.steps = 3;
  cfg.tile = 16;
  const OnlineResult r = train_online(base, f.degraded.y, f.degraded.u, f.raw.u, cfg);
  EXPECT_LE(r.final_loss, r.initial_loss);
  cfg.tile = 12;
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::kConfig);
  cfg.tile = 0;
  cfg.steps = -1;
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::kConfig);
}

TEST_F(Online, InputErrors) {
  EXPECT_EQ(code_of([&] { train_online(base, f.degraded.u, f.degraded.u, f.raw.u, OnlineConfig{}); }),
            ErrorCode::kShapeMismatch);
  EXPECT_EQ(code_of([&] { train_online(base, f.degraded.y, f.degraded.u, f.raw.y, OnlineConfig{}); }),
            ErrorCode::kShapeMismatch);
}

TEST(NetworkInput, PadsToMultipleOfEight) {
  const FramePair f = frame_pair(52, 36, 1, 22);
  const NetworkInput in = make_network_input(f.raw.y, f.raw.u);
  EXPECT_EQ(in.width, 26);
  EXPECT_EQ(in.height, 18);
  EXPECT_EQ(in.chroma.shape(), (Shape{1, 1, 24, 32}));
  EXPECT_EQ(in.luma.shape(), (Shape{1, 1, 48, 64}));
  const Plane out = enhance_chroma(build_oldn(tiny(), 1), f.raw.y, f.raw.u);
  EXPECT_EQ(out.width, 26);
  EXPECT_EQ(out.height, 18);
}

}  // namespace
}  // namespace oldn
