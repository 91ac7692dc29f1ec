#include "oldn/network/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "oldn/error.hpp"
#include "oldn/network/model.hpp"

namespace oldn {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[4] = {'O', 'L', 'D', 'N'};

template <typename U>
void put(std::vector<std::uint8_t>& out, U v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(U));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename U>
  U get() {
    U v;
    std::memcpy(&v, take(sizeof(U)), sizeof(U));
    return v;
  }

  const std::uint8_t* take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw Error(ErrorCode::kTruncated, "checkpoint ends early");
    const std::uint8_t* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

const Tensor<float>& find(const ModelParams::Map& m, const std::string& path) {
  auto it = m.find(path);
  if (it == m.end()) throw Error(ErrorCode::kMalformedHeader, "checkpoint lacks " + path);
  return it->second.value;
}

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(const ModelParams& params) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.entries().size()));
  for (const auto& [name, p] : params.entries()) {
    if (name.size() > 0xffff) throw Error(ErrorCode::kInvalidArgument, "parameter name too long");
    put<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
    const Shape& s = p.value.shape();
    for (int d : {s.b, s.c, s.h, s.w}) put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    for (float v : p.value.data()) put<float>(out, v);
  }
  return out;
}

ModelParams deserialize_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (std::memcmp(r.take(4), kMagic, 4) != 0) throw Error(ErrorCode::kBadMagic, "not an OLDN checkpoint");
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::kBadVersion, "checkpoint version " + std::to_string(version));
  }
  const auto count = r.get<std::uint32_t>();
  ModelParams::Map entries;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = r.get<std::uint16_t>();
    const auto* name = reinterpret_cast<const char*>(r.take(len));
    std::string path(name, len);
    Shape s;
    s.b = static_cast<int>(r.get<std::uint32_t>());
    s.c = static_cast<int>(r.get<std::uint32_t>());
    s.h = static_cast<int>(r.get<std::uint32_t>());
    s.w = static_cast<int>(r.get<std::uint32_t>());
    std::vector<float> data(s.numel());
    std::memcpy(data.data(), r.take(data.size() * sizeof(float)), data.size() * sizeof(float));
    const ParamRole role = path.ends_with(".al.w") ? ParamRole::kOnline : ParamRole::kFrozen;
    entries.emplace(std::move(path), Parameter{Tensor<float>(s, std::move(data)), role});
  }
  if (!r.done()) throw Error(ErrorCode::kTrailingData, "bytes after the last checkpoint tensor");

  ModelParams params(infer_config(entries));
  for (auto& [path, p] : entries) params.add(path, std::move(p.value), p.role);

  // Every tensor the inferred topology expects must be present with its shape.
  const ModelParams reference = build_oldn(params.config(), 0);
  for (const auto& [path, p] : reference.entries()) {
    if (!params.contains(path) || params.at(path).value.shape() != p.value.shape()) {
      throw Error(ErrorCode::kMalformedHeader, "checkpoint tensor " + path + " missing or mis-shaped");
    }
  }
  if (reference.entries().size() != params.entries().size()) {
    throw Error(ErrorCode::kMalformedHeader, "checkpoint has unexpected tensors");
  }
  return params;
}

ModelConfig infer_config(const ModelParams::Map& entries) {
  ModelConfig c;
  const Tensor<float>& fuse = find(entries, "fuse.w");
  c.n = fuse.shape().b;
  c.n_wb_branch = 0;
  while (entries.contains(branch_block_prefix("spatial.chroma", c.n_wb_branch) + "conv1.w")) ++c.n_wb_branch;
  c.recon_blocks.clear();
  for (std::size_t i = 0;; ++i) {
    const std::string prefix = recon_prefix(i);
    if (!entries.contains(prefix + "conv1.w")) break;
    c.recon_blocks.push_back(entries.contains(prefix + "al.w") ? BlockKind::kOnlineWide : BlockKind::kWide);
  }
  if (c.recon_blocks.empty()) throw Error(ErrorCode::kMalformedHeader, "checkpoint has no reconstruction trunk");
  c.expand = find(entries, recon_prefix(0) + "conv1.w").shape().b / c.n;
  for (const auto& [path, p] : entries) {
    if (path.ends_with(".cab.fc1.w")) {
      c.cab_reduction = c.n / p.value.shape().b;
      break;
    }
  }
  try {
    c.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformedHeader, std::string("inconsistent checkpoint: ") + e.what());
  }
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params) {
  const auto bytes = serialize_checkpoint(params);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

}  // namespace oldn
