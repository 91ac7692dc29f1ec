// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "oldn/codec_sim/color.hpp"
#include "oldn/codec_sim/degrade.hpp"
#include "oldn/codec_sim/synthetic.hpp"
#include "oldn/freq/dct.hpp"
#include "oldn/harness/bd_rate.hpp"
#include "oldn/harness/metrics.hpp"
#include "oldn/harness/roundtrip.hpp"
#include "oldn/harness/selfcheck.hpp"
#include "oldn/param_codec/huffman.hpp"
#include "oldn/training/offline.hpp"
#include "oldn/training/patches.hpp"
#include "support/oracles.hpp"

using namespace oldn;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const Outcome& o) {
  std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

void run(const std::string& name, const std::function<Outcome()>& f) {
  try {
    report(name, f());
  } catch (const std::exception& e) {
    report(name, {false, std::string("exception: ") + e.what()});
  }
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome transforms() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  double roundtrip = 0, vs_oracle = 0, parseval = 0;
  for (int k = 0; k < 100; ++k) {
    const Tensor<float> x = oracle::random_tensor({1, 1, 64, 64}, rng, 0.0, 1.0).cast<float>();
    const Tensor<float> y = dct_conv(x);
    const Tensor<float> back = idct_conv(y);
    double ex = 0, ey = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      roundtrip = std::max(roundtrip, double(std::abs(back[i] - x[i])));
      ex += double(x[i]) * x[i];
      ey += double(y[i]) * y[i];
    }
    parseval = std::max(parseval, std::abs(ey - ex) / ex);
    for (int by = 0; by < 8; ++by)
      for (int bx = 0; bx < 8; ++bx)
        for (int u = 0; u < 8; ++u)
          for (int v = 0; v < 8; ++v) {
            const double ref = oracle::block_dct(x, 0, 0, by, bx, u, v);
            vs_oracle = std::max(vs_oracle, std::abs(double(y.at(0, u * 8 + v, by, bx)) - ref));
          }
  }
  const double t = seconds_since(t0);
  const bool ok = roundtrip <= 1e-5 && vs_oracle <= 1e-5 && parseval <= 1e-6 && t < 5.0;
  return {ok, fmt("roundtrip %.2e (<=1e-5), oracle %.2e (<=1e-5), parseval %.2e (<=1e-6), %.2fs (<5s)", roundtrip,
                  vs_oracle, parseval, t)};
}

Outcome gradients() {
  const auto t0 = Clock::now();
  const auto results = run_gradient_suite(7, 1e-4);
  const double t = seconds_since(t0);
  double worst = 0;
  std::string failed;
  for (const auto& r : results) {
    worst = std::max(worst, r.value);
    if (!r.passed) failed += " " + r.name;
  }
  const bool ok = failed.empty() && t < 60.0;
  return {ok, fmt("%zu checks, max rel %.2e (<=1e-4), %.2fs (<60s)%s", results.size(), worst, t,
                  failed.empty() ? "" : (", failed:" + failed).c_str())};
}

std::vector<std::int16_t> codec_vector(std::mt19937_64& rng, int kind) {
  const std::size_t n = 1 + rng() % 512;
  std::vector<std::int16_t> s(n, 0);
  switch (kind) {
    case 0:  // all zeros
      break;
    case 1:  // one non-zero symbol
      std::fill(s.begin(), s.end(), static_cast<std::int16_t>(int(rng() % 65535) - 32767));
      break;
    case 2:  // 95% zeros
      for (auto& v : s)
        if (rng() % 20 == 0) v = static_cast<std::int16_t>(int(rng() % 33) - 16);
      break;
    case 3:  // geometric, very deep codes
      for (auto& v : s) {
        int k = 0;
        while (k < 24 && (rng() & 1)) ++k;
        v = static_cast<std::int16_t>(rng() & 2 ? k : -k);
      }
      break;
    default:  // full range
      for (auto& v : s) v = static_cast<std::int16_t>(int(rng() % 65535) - 32767);
  }
  return s;
}

ErrorCode decode_error(const std::vector<std::uint8_t>& b) {
  try {
    huffman_decode(b);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;  // accepted; never an expected code below
}

Outcome entropy_codec() {
  std::mt19937_64 rng(202);
  int exact = 0;
  for (int t = 0; t < 1000; ++t) {
    const ResidualSymbols r{codec_vector(rng, t % 5), static_cast<int>(rng() % 31)};
    if (huffman_decode(huffman_encode(r)) == r) ++exact;
  }
  const auto good = huffman_encode(ResidualSymbols{{0, 0, 1, 0, -1, 0, 0, 2, 0, 0}, 8}).bytes;
  std::vector<std::pair<std::string, bool>> cases;
  auto expect = [&](const std::string& what, std::vector<std::uint8_t> b, ErrorCode code) {
    cases.emplace_back(what, decode_error(b) == code);
  };
  auto mutate = [&](auto f) {
    auto b = good;
    f(b);
    return b;
  };
  expect("magic", mutate([](auto& b) { b[0] = 'X'; }), ErrorCode::kBadMagic);
  expect("version", mutate([](auto& b) { b[4] = 7; }), ErrorCode::kBadVersion);
  expect("truncated header", mutate([](auto& b) { b.resize(8); }), ErrorCode::kTruncated);
  expect("truncated table", mutate([](auto& b) { b.resize(kStreamFixedHeaderBytes + 4); }), ErrorCode::kTruncated);
  expect("truncated payload", mutate([](auto& b) { b.pop_back(); }), ErrorCode::kTruncated);
  expect("zero length", mutate([](auto& b) { b[kStreamFixedHeaderBytes + 2] = 0; }), ErrorCode::kInvalidCodeTable);
  expect("oversubscribed", mutate([](auto& b) {
           for (int i = 0; i < 4; ++i) b[kStreamFixedHeaderBytes + 3 * i + 2] = 1;
         }),
         ErrorCode::kInvalidCodeTable);
  expect("trailing", mutate([](auto& b) { b.push_back(0); }), ErrorCode::kTrailingData);
  std::string bad;
  for (const auto& [what, ok] : cases)
    if (!ok) bad += " " + what;
  const bool ok = exact == 1000 && bad.empty();
  return {ok, fmt("%d/1000 exact round trips, %zu malformed cases%s", exact, cases.size(),
                  bad.empty() ? " rejected as specified" : (", wrong:" + bad).c_str())};
}

Outcome bd_machinery() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto curve = [&] {
    std::vector<oracle::RdSample> s;
    const double p0 = 28 + 6 * u(rng), slope = 0.08 + 0.1 * u(rng), bend = 0.004 * (u(rng) - 0.5), base = 4 + u(rng);
    double p = p0;
    for (int i = 0; i < 4; ++i) {
      p += 2.0 + 2.5 * u(rng);
      s.push_back({std::pow(10.0, base + slope * (p - p0) + bend * (p - p0) * (p - p0)), p});
    }
    return s;
  };
  auto to_curve = [](const std::vector<oracle::RdSample>& s) {
    RdCurve c;
    for (const auto& p : s) c.push_back({p.rate, p.psnr});
    return c;
  };
  const RdCurve c = to_curve(curve());
  const double self = bd_rate(c, c);
  RdCurve cheaper = c;
  for (auto& p : cheaper) p.rate *= 0.9;
  const double shift = bd_rate(c, cheaper);
  double worst = 0;
  for (int t = 0; t < 50; ++t) {
    const auto a = curve();
    auto b = a;
    const double dp = 1.6 * (u(rng) - 0.5), dr = 0.3 * (u(rng) - 0.5);
    for (auto& p : b) {
      p.psnr += dp + 0.4 * (u(rng) - 0.5);
      p.rate *= 1 + dr;
    }
    worst = std::max(worst, std::abs(bd_rate(to_curve(a), to_curve(b)) - oracle::bd_rate_trapezoid(a, b)));
  }
  const bool ok = self == 0.0 && std::abs(shift + 10.0) <= 0.01 && worst <= 0.1;
  return {ok, fmt("bd(c,c)=%g, 10%% cheaper=%.6f%%, max |diff| vs oracle over 50 pairs %.2e (<=0.1)", self, shift, worst)};
}

Outcome degradation() {
  bool monotone = true;
  std::string trace;
  for (std::uint64_t seed : {11u, 12u, 13u, 14u, 15u}) {
    const Yuv420Frame f = rgb_to_yuv420(synthetic_image(256, 256, seed));
    double prev = 1e9;
    for (int qp : {22, 27, 32, 37}) {
      double p = 0;
      for (const Plane* pl : {&f.y, &f.u, &f.v}) p += psnr(*pl, degrade_plane(*pl, QpConfig(qp)));
      p /= 3;
      if (!(p < prev)) monotone = false;
      if (seed == 11) trace += fmt(" %.2f", p);
      prev = p;
    }
  }
  const bool steps = qstep_for_qp(22) == 8.0 && qstep_for_qp(4) == 1.0;
  return {monotone && steps, fmt("PSNR strictly falling on 5 images (first:%s dB), qstep(22)=%g qstep(4)=%g",
                                 trace.c_str(), qstep_for_qp(22), qstep_for_qp(4))};
}

// ---------------------------------------------------------------------------

struct Desk {
  int epochs;
  double lr;
  double lr_final;
  int batch;
  bool zero_tail;
};

struct Trained {
  ModelParams model;
  double seconds = 0;
  std::vector<double> losses;
};

Trained train_desk_model(const Desk& d) {
  const auto t0 = Clock::now();
  // 100 frames × 10 patches × {U, V} = 2000 pairs at QP 27
  Dataset ds;
  for (int i = 0; i < 100; ++i) {
    const Yuv420Frame raw = rgb_to_yuv420(synthetic_image(128, 128, 1000 + i));
    const Yuv420Frame deg = degrade_frame(raw, QpConfig(27)).frame;
    append_frame_patches(ds, raw, deg, 10, 5000 + 2 * static_cast<std::uint64_t>(i));
  }
  OfflineConfig cfg;
  cfg.model.n = 16;
  cfg.epochs = d.epochs;
  cfg.lr = d.lr;
  cfg.lr_final = d.lr_final;
  cfg.batch_size = d.batch;
  cfg.zero_tail = d.zero_tail;
  cfg.seed = 1;
  OfflineResult r = train_offline(ds, cfg, [](int e, double l) {
    std::fprintf(stderr, "  offline epoch %d loss %.4e\n", e + 1, l);
  });
  return {std::move(r.params), seconds_since(t0), std::move(r.epoch_losses)};
}

// Held-out frames use seeds disjoint from the training set.
std::vector<Yuv420Frame> held_out(int count, std::uint64_t base) {
  std::vector<Yuv420Frame> out;
  for (int i = 0; i < count; ++i) out.push_back(rgb_to_yuv420(synthetic_image(128, 128, base + i)));
  return out;
}

Outcome online_gain(const Trained& t) {
  const auto t0 = Clock::now();
  double base_sum = 0, online_sum = 0;
  std::size_t max_side = 0;
  bool parity = true;
  const auto frames = held_out(10, 90000);
  for (const auto& f : frames) {
    RoundtripOptions opt;
    opt.online_config.steps = 100;
    const RoundtripReport r = simulate_roundtrip(f, 32, t.model, opt);
    base_sum += r.baseline_psnr;
    online_sum += r.enhanced_psnr;
    max_side = std::max(max_side, r.side_bits);
    parity = parity && r.parity_ok;
    std::fprintf(stderr, "  frame: degraded %.3f baseline %.3f online %.3f side %zu bits\n", r.degraded_psnr,
                 r.baseline_psnr, r.enhanced_psnr, r.side_bits);
  }
  const double total = t.seconds + seconds_since(t0);
  const double gain = (online_sum - base_sum) / double(frames.size());
  const bool ok = gain >= 0.05 && max_side <= 2048 * 8 && total < 1800.0;
  return {ok, fmt("mean online gain %+.4f dB over baseline (>=+0.05), max side %zu bytes (<=2048), %.0fs incl. "
                  "%.0fs offline (<1800s)",
                  gain, (max_side + 7) / 8, total, t.seconds)};
}

Outcome baseline_sanity(const Trained& t) {
  double gain = 0;
  const auto frames = held_out(10, 80000);
  for (const auto& f : frames) {
    const Yuv420Frame deg = degrade_frame(f, QpConfig(27)).frame;
    for (const Plane Yuv420Frame::*c : {&Yuv420Frame::u, &Yuv420Frame::v}) {
      const Plane out = enhance_chroma(t.model, deg.y, deg.*c);
      gain += psnr(f.*c, out) - psnr(f.*c, deg.*c);
    }
  }
  gain /= 2.0 * double(frames.size());
  return {gain > 0.0, fmt("mean chroma gain %+.4f dB over degraded on 10 held-out frames at QP 27 (>0)", gain)};
}

Outcome parity(const ModelParams& model) {
  std::mt19937_64 rng(404);
  const int qps[] = {22, 27, 32, 37};
  int identical = 0, runs = 0;
  for (; runs < 24; ++runs) {
    const int w = 32 + 16 * int(rng() % 4), h = 32 + 16 * int(rng() % 3);
    const RgbImage img = synthetic_image(w, h, rng());
    const Yuv420Frame raw = rgb_to_yuv420(img);
    const Yuv420Frame deg = degrade_frame(raw, QpConfig(qps[runs % 4])).frame;
    RoundtripOptions opt;
    opt.online_config.steps = 20;
    const Plane& rc = runs % 2 ? raw.v : raw.u;
    const Plane& dc = runs % 2 ? deg.v : deg.u;
    const EncodedPlane e = encode_plane(model, deg.y, dc, rc, opt);
    const DecodedPlane d = decode_plane(model, deg.y, dc, e.stream);
    const bool same = d.residual == e.residual && d.output.shape() == e.output.shape() &&
                      std::memcmp(d.output.data().data(), e.output.data().data(), e.output.size() * sizeof(float)) == 0 &&
                      d.enhanced == e.enhanced;
    identical += same;
  }
  return {identical == runs, fmt("%d/%d decoder outputs bit-identical to the encoder's", identical, runs)};
}

Outcome no_op(const ModelParams& model) {
  bool ok = true;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Yuv420Frame raw = rgb_to_yuv420(synthetic_image(64, 48, 70000 + seed));
    RoundtripOptions opt;
    opt.online_config.steps = 0;
    const RoundtripReport r = simulate_roundtrip(raw, 32, model, opt);
    ok = ok && r.enhanced == r.baseline && r.parity_ok;
    const Yuv420Frame deg = degrade_frame(raw, QpConfig(32)).frame;
    for (const Plane Yuv420Frame::*c : {&Yuv420Frame::u, &Yuv420Frame::v}) {
      const EncodedPlane e = encode_plane(model, deg.y, deg.*c, raw.*c, opt);
      ok = ok && huffman_decode(e.stream).all_zero() && e.enhanced == enhance_chroma(model, deg.y, deg.*c);
    }
  }
  return {ok, ok ? "steps=0 output equals baseline inference; streams decode to all zeros" : "mismatch"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  Desk desk{10, 2e-4, 1e-5, 16, true};
  app.add_option("--epochs", desk.epochs, "offline epochs for the desk-scale model")->check(CLI::Range(5, 1000));
  app.add_option("--lr", desk.lr, "offline learning rate");
  app.add_option("--lr-final", desk.lr_final, "cosine floor, 0 keeps lr constant");
  app.add_option("--batch", desk.batch, "offline batch size");
  bool he_tail = false;
  app.add_flag("--he-tail", he_tail, "keep the He-uniform tail instead of zeroing it");
  CLI11_PARSE(app, argc, argv);
  desk.zero_tail = !he_tail;

  run("transform exactness", transforms);
  run("gradient suite", gradients);
  run("entropy codec", entropy_codec);
  run("bd-rate machinery", bd_machinery);
  run("degradation model", degradation);

  std::fprintf(stderr, "training desk-scale model: %d epochs, lr %g, batch %d\n", desk.epochs, desk.lr, desk.batch);
  Trained t;
  try {
    t = train_desk_model(desk);
  } catch (const std::exception& e) {
    report("offline training", {false, e.what()});
    return 1;
  }
  run("encoder/decoder parity", [&] { return parity(t.model); });
  run("online-learning gain", [&] { return online_gain(t); });
  run("baseline sanity", [&] { return baseline_sanity(t); });
  run("no-op contract", [&] { return no_op(t.model); });
  return failures == 0 ? 0 : 1;
}
