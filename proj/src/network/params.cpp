#include "oldn/network/params.hpp"

#include <cstring>

#include "oldn/error.hpp"

namespace oldn {

void ModelParams::add(std::string path, Tensor<float> value, ParamRole role) {
  entries_.insert_or_assign(std::move(path), Parameter{std::move(value), role});
}

bool ModelParams::contains(std::string_view path) const {
  return entries_.find(path) != entries_.end();
}

const Parameter& ModelParams::at(std::string_view path) const {
  auto it = entries_.find(path);
  if (it == entries_.end()) throw Error(ErrorCode::kInvalidArgument, "unknown parameter " + std::string(path));
  return it->second;
}

Parameter& ModelParams::at(std::string_view path) {
  auto it = entries_.find(path);
  if (it == entries_.end()) throw Error(ErrorCode::kInvalidArgument, "unknown parameter " + std::string(path));
  return it->second;
}

std::size_t ModelParams::scalar_count() const {
  return scalar_count("");
}

std::size_t ModelParams::scalar_count(std::string_view prefix) const {
  std::size_t total = 0;
  for (const auto& [path, p] : entries_) {
    if (std::string_view(path).starts_with(prefix)) total += p.value.size();
  }
  return total;
}

std::size_t ModelParams::online_count() const {
  std::size_t total = 0;
  for (const auto& [path, p] : entries_) {
    if (p.role == ParamRole::kOnline) total += p.value.size();
  }
  return total;
}

std::vector<std::string> ModelParams::online_paths() const {
  std::vector<std::string> out;
  for (const auto& [path, p] : entries_) {
    if (p.role == ParamRole::kOnline) out.push_back(path);
  }
  return out;
}

AlSnapshot ModelParams::al_snapshot() const {
  AlSnapshot snap;
  for (const auto& [path, p] : entries_) {
    if (p.role != ParamRole::kOnline) continue;
    const auto d = p.value.data();
    snap.weights.insert(snap.weights.end(), d.begin(), d.end());
  }
  return snap;
}

void ModelParams::set_al_snapshot(const AlSnapshot& snapshot) {
  if (snapshot.size() != online_count()) {
    throw Error(ErrorCode::kSizeMismatch, "snapshot has " + std::to_string(snapshot.size()) +
                                              " weights, model has " + std::to_string(online_count()));
  }
  std::size_t offset = 0;
  for (auto& [path, p] : entries_) {
    if (p.role != ParamRole::kOnline) continue;
    auto d = p.value.data();
    std::copy_n(snapshot.weights.begin() + static_cast<std::ptrdiff_t>(offset), d.size(), d.begin());
    offset += d.size();
  }
}

bool ModelParams::frozen_bits_equal(const ModelParams& other) const {
  auto frozen = [](const Map& m) {
    std::vector<const Map::value_type*> out;
    for (const auto& kv : m) {
      if (kv.second.role == ParamRole::kFrozen) out.push_back(&kv);
    }
    return out;
  };
  const auto a = frozen(entries_);
  const auto b = frozen(other.entries_);
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i]->first != b[i]->first) return false;
    const Tensor<float>& x = a[i]->second.value;
    const Tensor<float>& y = b[i]->second.value;
    if (x.shape() != y.shape()) return false;
    if (std::memcmp(x.data().data(), y.data().data(), x.size() * sizeof(float)) != 0) return false;
  }
  return true;
}

}  // namespace oldn
