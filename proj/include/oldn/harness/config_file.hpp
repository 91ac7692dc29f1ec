#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace oldn {

// Flat "key = value" text. '#' starts a comment, blank lines are ignored,
// whitespace around keys and values is trimmed. Duplicate keys and lines
// without '=' raise kConfig.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;
  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(std::string_view key) const;
  void set(std::string key, std::string value);
  // Removes the key and returns its value (empty if absent).
  std::string take(std::string_view key);

  std::string get_string(std::string_view key, std::string fallback) const;
  int get_int(std::string_view key, int fallback) const;
  std::uint64_t get_u64(std::string_view key, std::uint64_t fallback) const;
  double get_double(std::string_view key, double fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;
  // Comma-separated items, trimmed, empty items dropped.
  std::vector<std::string> get_list(std::string_view key) const;
  std::vector<int> get_int_list(std::string_view key, std::vector<int> fallback) const;

  // Throws kConfig naming the first key not in `known`.
  void require_known(const std::vector<std::string>& known) const;

  const std::map<std::string, std::string, std::less<>>& values() const noexcept { return values_; }

 private:
  const std::string* find(std::string_view key) const;
  std::map<std::string, std::string, std::less<>> values_;
};

}  // namespace oldn
