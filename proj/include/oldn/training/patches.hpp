#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "oldn/codec_sim/plane.hpp"
#include "oldn/tensor/tensor.hpp"

namespace oldn {

inline constexpr int kChromaPatch = 32;
inline constexpr int kLumaPatch = 64;

// Top-left corner of a chroma patch; the luma patch starts at twice that.
struct PatchOrigin {
  int x = 0;
  int y = 0;

  int luma_x() const noexcept { return 2 * x; }
  int luma_y() const noexcept { return 2 * y; }
  friend bool operator==(const PatchOrigin&, const PatchOrigin&) = default;
};

struct PatchPair {
  PatchOrigin origin;
  Plane luma;    // 2·size square
  Plane chroma;  // size square
};

// Uniform origins such that a size×size chroma patch fits the plane.
std::vector<PatchOrigin> sample_patch_origins(int chroma_width, int chroma_height, int count, std::uint64_t seed,
                                              int size = kChromaPatch);

// Co-located luma/chroma patches. Throws kShapeMismatch when the planes are
// not in 4:2:0 ratio and kInvalidArgument when the patch does not fit.
std::vector<PatchPair> extract_patches(const Plane& luma, const Plane& chroma, int count, std::uint64_t seed,
                                       int size = kChromaPatch);

Plane crop_region(const Plane& p, int x, int y, int w, int h);

// One network training example, values in [0,1], each (1,1,h,w).
struct TrainingSample {
  Tensor<float> luma;    // degraded Y
  Tensor<float> chroma;  // degraded U or V
  Tensor<float> target;  // raw U or V
};

struct Dataset {
  std::vector<TrainingSample> samples;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
};

// Patches from both chroma planes of a raw/degraded frame pair:
// `per_plane` from U and as many from V.
void append_frame_patches(Dataset& out, const Yuv420Frame& raw, const Yuv420Frame& degraded, int per_plane,
                          std::uint64_t seed, int size = kChromaPatch);

struct ManifestEntry {
  std::filesystem::path path;
  int qp = 27;
};

// Lines of "<path> <qp>" or "<path>,<qp>"; blank lines and '#' comments are
// skipped; relative paths resolve against the manifest's directory.
std::vector<ManifestEntry> parse_manifest(const std::string& text, const std::filesystem::path& base_dir);
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

// Loads each image, converts to 4:2:0, degrades at its QP and extracts
// `per_plane` patch pairs from each chroma plane.
Dataset build_dataset(const std::vector<ManifestEntry>& entries, int per_plane, std::uint64_t seed);

}  // namespace oldn
