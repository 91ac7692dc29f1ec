#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "oldn/codec_sim/color.hpp"
#include "oldn/codec_sim/degrade.hpp"
#include "oldn/codec_sim/image_io.hpp"
#include "oldn/codec_sim/synthetic.hpp"

namespace oldn {
namespace {

double ref_psnr(const Plane& a, const Plane& b) {
  double se = 0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const double d = double(a.samples[i]) - double(b.samples[i]);
    se += d * d;
  }
  const double mse = se / double(a.samples.size());
  return mse == 0 ? 99.0 : 10.0 * std::log10(255.0 * 255.0 / mse);
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidArgument;
}

RgbImage solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  RgbImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      auto* p = img.pixel(x, y);
      p[0] = r, p[1] = g, p[2] = b;
    }
  return img;
}

Plane random_plane(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Plane p(w, h);
  for (auto& s : p.samples) s = static_cast<std::uint8_t>(rng() & 0xff);
  return p;
}

TEST(Color, BlackMapsToOffsets) {
  const Yuv420Frame f = rgb_to_yuv420(solid(4, 4, 0, 0, 0));
  EXPECT_EQ(f.y.at(0, 0), 16);
  EXPECT_EQ(f.u.at(0, 0), 128);
  EXPECT_EQ(f.v.at(1, 1), 128);
}

TEST(Color, GreyHasNeutralChroma) {
  const Yuv420Frame f = rgb_to_yuv420(solid(2, 2, 128, 128, 128));
  EXPECT_EQ(f.y.at(1, 1), 144);
  EXPECT_EQ(f.u.at(0, 0), 128);
  EXPECT_EQ(f.v.at(0, 0), 128);
}

TEST(Color, ChromaRowsSumToZero) {
  for (int r = 1; r < 3; ++r) EXPECT_NEAR(kRgbToYuv[r][0] + kRgbToYuv[r][1] + kRgbToYuv[r][2], 0.0, 1e-4);
}

TEST(Color, WhiteClampsLuma) {
  EXPECT_EQ(rgb_to_yuv420(solid(2, 2, 255, 255, 255)).y.at(0, 0), 255);
}

TEST(Color, MidRangeRoundTripWithinFour) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> d(32, 192);
  // constant 2×2 cells so subsampling is lossless and only rounding remains
  RgbImage img(32, 32);
  for (int cy = 0; cy < 16; ++cy)
    for (int cx = 0; cx < 16; ++cx) {
      const int r = d(rng), g = d(rng), b = d(rng);
      for (int k = 0; k < 4; ++k) {
        auto* p = img.pixel(2 * cx + k % 2, 2 * cy + k / 2);
        p[0] = r, p[1] = g, p[2] = b;
      }
    }
  const RgbImage back = yuv420_to_rgb(rgb_to_yuv420(img));
  int worst = 0;
  for (std::size_t i = 0; i < img.rgb.size(); ++i) worst = std::max(worst, std::abs(int(img.rgb[i]) - int(back.rgb[i])));
  EXPECT_LE(worst, 4);
}

TEST(Color, OddExtentRejected) {
  EXPECT_EQ(code_of([] { rgb_to_yuv420(RgbImage(5, 4)); }), ErrorCode::kDivisibility);
}

TEST(Degrade, QstepLaw) {
  EXPECT_EQ(qstep_for_qp(22), 8.0);
  EXPECT_EQ(qstep_for_qp(4), 1.0);
  EXPECT_EQ(qstep_for_qp(28), 16.0);
  EXPECT_NEAR(qstep_for_qp(27), 8.0 * std::pow(2.0, 5.0 / 6.0), 1e-12);
  EXPECT_THROW(QpConfig(-1), Error);
  EXPECT_THROW(QpConfig(52), Error);
}

TEST(Degrade, FinestStepWithinOne) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Plane p = random_plane(24, 16, seed);
    const Plane q = degrade_plane(p, QpConfig(4));
    for (std::size_t i = 0; i < p.samples.size(); ++i) EXPECT_LE(std::abs(int(p.samples[i]) - int(q.samples[i])), 1);
  }
}

TEST(Degrade, PsnrFallsWithQp) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Yuv420Frame f = rgb_to_yuv420(synthetic_image(128, 128, seed));
    double prev = 1e9;
    for (int qp : {22, 27, 32, 37}) {
      const double psnr = ref_psnr(f.y, degrade_plane(f.y, QpConfig(qp)));
      EXPECT_LT(psnr, prev) << "qp " << qp;
      prev = psnr;
    }
  }
}

TEST(Degrade, NearlyIdempotent) {
  const Yuv420Frame f = rgb_to_yuv420(synthetic_image(96, 64, 5));
  for (int qp : {22, 32, 37}) {
    const Plane once = degrade_plane(f.u, QpConfig(qp));
    const Plane twice = degrade_plane(once, QpConfig(qp));
    EXPECT_LT(std::abs(ref_psnr(f.u, once) - ref_psnr(f.u, twice)), 0.5);
  }
}

TEST(Degrade, NonMultipleOfEightAndLevels) {
  const Plane p = random_plane(13, 9, 7);
  const DegradedPlane d = degrade_plane_with_levels(p, QpConfig(32));
  EXPECT_EQ(d.plane.width, 13);
  EXPECT_EQ(d.plane.height, 9);
  EXPECT_EQ(d.levels.size(), 4u * 64u);
  EXPECT_EQ(degrade_plane(p, QpConfig(32)), d.plane);
}

TEST(Degrade, FrameLevelsCoverAllPlanes) {
  const Yuv420Frame f = rgb_to_yuv420(synthetic_image(32, 16, 3));
  const DegradedFrame d = degrade_frame(f, QpConfig(27));
  EXPECT_EQ(d.levels.size(), std::size_t(32 * 16 + 2 * 16 * 8));
  EXPECT_EQ(d.frame.u, degrade_plane(f.u, QpConfig(27)));
}

TEST(ImageIo, InMemoryRoundTrips) {
  const Plane p = random_plane(7, 5, 1);
  EXPECT_EQ(decode_pgm(encode_pgm(p)), p);
  const RgbImage img = synthetic_image(10, 6, 2);
  EXPECT_EQ(decode_ppm(encode_ppm(img)), img);
  const Yuv420Frame f = rgb_to_yuv420(synthetic_image(16, 10, 3));
  const auto raw = encode_yuv420(f);
  EXPECT_EQ(raw.size(), 16u * 10u * 3u / 2u);
  EXPECT_EQ(decode_yuv420(raw, 16, 10), f);
}

TEST(ImageIo, FileRoundTrips) {
  const auto dir = std::filesystem::temp_directory_path() / "oldn_io_test";
  std::filesystem::create_directories(dir);
  const Plane p = random_plane(9, 4, 4);
  save_pgm(dir / "a.pgm", p);
  EXPECT_EQ(load_pgm(dir / "a.pgm"), p);
  const RgbImage img = synthetic_image(8, 8, 5);
  save_ppm(dir / "a.ppm", img);
  EXPECT_EQ(load_ppm(dir / "a.ppm"), img);
  EXPECT_EQ(load_rgb_image(dir / "a.ppm"), img);
  const RgbImage grey = load_rgb_image(dir / "a.pgm");
  EXPECT_EQ(grey.pixel(3, 2)[0], p.at(3, 2));
  EXPECT_EQ(grey.pixel(3, 2)[2], p.at(3, 2));
  const Yuv420Frame f = rgb_to_yuv420(img);
  save_yuv420(dir / "a.yuv", f);
  EXPECT_EQ(std::filesystem::file_size(dir / "a.yuv"), 96u);
  EXPECT_EQ(load_yuv420(dir / "a.yuv", 8, 8), f);
  std::filesystem::remove_all(dir);
}

TEST(ImageIo, HeaderCommentsAccepted) {
  const std::string text = "P5\n# made by hand\n2 1\n255\n\x01\x02";
  const std::vector<std::uint8_t> bytes(text.begin(), text.end());
  const Plane p = decode_pgm(bytes);
  EXPECT_EQ(p.width, 2);
  EXPECT_EQ(p.at(1, 0), 2);
}

TEST(ImageIo, StructuredErrors) {
  auto bytes_of = [](const std::string& s) { return std::vector<std::uint8_t>(s.begin(), s.end()); };
  EXPECT_EQ(code_of([&] { decode_pgm(bytes_of("P5 2 1 65535\n\x01\x02\x03\x04")); }), ErrorCode::kUnsupportedFormat);
  EXPECT_EQ(code_of([&] { decode_pgm(bytes_of("P9 2 1 255\n\x01\x02")); }), ErrorCode::kMalformedHeader);
  EXPECT_EQ(code_of([&] { decode_pgm(bytes_of("P5 2 x 255\n")); }), ErrorCode::kMalformedHeader);
  EXPECT_EQ(code_of([&] { decode_pgm(bytes_of("P5 2 2 255\n\x01\x02")); }), ErrorCode::kSizeMismatch);
  EXPECT_EQ(code_of([&] { decode_ppm(bytes_of("P5 1 1 255\n\x01")); }), ErrorCode::kUnsupportedFormat);
  EXPECT_EQ(code_of([&] { decode_yuv420(std::vector<std::uint8_t>(10), 4, 4); }), ErrorCode::kSizeMismatch);
  EXPECT_EQ(code_of([&] { decode_yuv420(std::vector<std::uint8_t>(10), 3, 4); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { load_pgm("/nonexistent/oldn.pgm"); }), ErrorCode::kIo);
}

TEST(Synthetic, DeterministicAndVaried) {
  EXPECT_EQ(synthetic_image(32, 32, 9), synthetic_image(32, 32, 9));
  EXPECT_NE(synthetic_image(32, 32, 9), synthetic_image(32, 32, 10));
}

}  // namespace
}  // namespace oldn
