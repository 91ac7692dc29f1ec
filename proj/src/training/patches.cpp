#include "oldn/training/patches.hpp"

#include <charconv>
#include <random>
#include <sstream>

#include "oldn/codec_sim/color.hpp"
#include "oldn/codec_sim/degrade.hpp"
#include "oldn/codec_sim/image_io.hpp"

namespace oldn {
namespace {

// Portable uniform integer in [0, n): rejection sampling on raw 64-bit draws.
int uniform_below(std::mt19937_64& rng, int n) {
  const std::uint64_t un = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
  std::uint64_t r;
  do r = rng(); while (r >= limit);
  return static_cast<int>(r % un);
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<PatchOrigin> sample_patch_origins(int chroma_width, int chroma_height, int count, std::uint64_t seed,
                                              int size) {
  if (count < 0) throw Error(ErrorCode::kInvalidArgument, "negative patch count");
  if (size < 1 || chroma_width < size || chroma_height < size) {
    throw Error(ErrorCode::kInvalidArgument, "patch " + std::to_string(size) + " does not fit a " +
                                                 std::to_string(chroma_width) + "x" + std::to_string(chroma_height) +
                                                 " plane");
  }
  std::mt19937_64 rng(seed);
  std::vector<PatchOrigin> out(static_cast<std::size_t>(count));
  for (auto& o : out) {
    o.x = uniform_below(rng, chroma_width - size + 1);
    o.y = uniform_below(rng, chroma_height - size + 1);
  }
  return out;
}

Plane crop_region(const Plane& p, int x, int y, int w, int h) {
  if (x < 0 || y < 0 || w < 0 || h < 0 || x + w > p.width || y + h > p.height) {
    throw Error(ErrorCode::kInvalidArgument, "crop outside the plane");
  }
  Plane out(w, h);
  for (int r = 0; r < h; ++r) {
    std::copy_n(p.samples.begin() + static_cast<std::ptrdiff_t>(y + r) * p.width + x, w,
                out.samples.begin() + static_cast<std::ptrdiff_t>(r) * w);
  }
  return out;
}

std::vector<PatchPair> extract_patches(const Plane& luma, const Plane& chroma, int count, std::uint64_t seed,
                                       int size) {
  if (luma.width != 2 * chroma.width || luma.height != 2 * chroma.height) {
    throw Error(ErrorCode::kShapeMismatch, "luma and chroma planes are not in 4:2:0 ratio");
  }
  std::vector<PatchPair> out;
  for (const PatchOrigin& o : sample_patch_origins(chroma.width, chroma.height, count, seed, size)) {
    out.push_back({o, crop_region(luma, o.luma_x(), o.luma_y(), 2 * size, 2 * size),
                   crop_region(chroma, o.x, o.y, size, size)});
  }
  return out;
}

void append_frame_patches(Dataset& out, const Yuv420Frame& raw, const Yuv420Frame& degraded, int per_plane,
                          std::uint64_t seed, int size) {
  raw.validate();
  degraded.validate();
  if (raw.width() != degraded.width() || raw.height() != degraded.height()) {
    throw Error(ErrorCode::kShapeMismatch, "raw and degraded frames differ in size");
  }
  const std::pair<const Plane*, const Plane*> planes[] = {{&raw.u, &degraded.u}, {&raw.v, &degraded.v}};
  std::uint64_t plane_seed = seed;
  for (const auto& [raw_c, deg_c] : planes) {
    for (const PatchOrigin& o : sample_patch_origins(raw_c->width, raw_c->height, per_plane, plane_seed++, size)) {
      out.samples.push_back({
          plane_to_tensor<float>(crop_region(degraded.y, o.luma_x(), o.luma_y(), 2 * size, 2 * size)),
          plane_to_tensor<float>(crop_region(*deg_c, o.x, o.y, size, size)),
          plane_to_tensor<float>(crop_region(*raw_c, o.x, o.y, size, size)),
      });
    }
  }
}

std::vector<ManifestEntry> parse_manifest(const std::string& text, const std::filesystem::path& base_dir) {
  std::vector<ManifestEntry> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto sep = line.find_last_of(", \t");
    if (sep == std::string::npos) {
      throw Error(ErrorCode::kConfig, "manifest line " + std::to_string(line_no) + ": expected '<path> <qp>'");
    }
    const std::string path = trim(line.substr(0, sep));
    const std::string qp_text = trim(line.substr(sep + 1));
    int qp = 0;
    auto [end, ec] = std::from_chars(qp_text.data(), qp_text.data() + qp_text.size(), qp);
    if (path.empty() || ec != std::errc{} || end != qp_text.data() + qp_text.size()) {
      throw Error(ErrorCode::kConfig, "manifest line " + std::to_string(line_no) + ": bad record '" + line + "'");
    }
    if (qp < kMinQp || qp > kMaxQp) {
      throw Error(ErrorCode::kConfig, "manifest line " + std::to_string(line_no) + ": qp " + qp_text + " out of range");
    }
    std::filesystem::path p(path);
    out.push_back({p.is_absolute() ? p : base_dir / p, qp});
  }
  return out;
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_manifest(std::string(bytes.begin(), bytes.end()), path.parent_path());
}

Dataset build_dataset(const std::vector<ManifestEntry>& entries, int per_plane, std::uint64_t seed) {
  Dataset ds;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const Yuv420Frame raw = rgb_to_yuv420(load_rgb_image(entries[i].path));
    const Yuv420Frame degraded = degrade_frame(raw, QpConfig(entries[i].qp)).frame;
    append_frame_patches(ds, raw, degraded, per_plane, seed + 2 * i);
  }
  return ds;
}

}  // namespace oldn
