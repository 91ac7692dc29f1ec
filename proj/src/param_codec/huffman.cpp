#include "oldn/param_codec/huffman.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <set>

namespace oldn {
namespace {

constexpr char kMagic[4] = {'A', 'L', 'R', 'S'};

std::map<std::int16_t, std::uint64_t> histogram(std::span<const std::int16_t> symbols) {
  std::map<std::int16_t, std::uint64_t> h;
  for (std::int16_t s : symbols) ++h[s];
  return h;
}

// Assigns consecutive codewords within each length, lengths ascending.
void assign_codes(std::vector<CodeEntry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const CodeEntry& a, const CodeEntry& b) {
    return a.length != b.length ? a.length < b.length : a.symbol < b.symbol;
  });
  std::uint64_t code = 0;
  int len = entries.empty() ? 0 : entries.front().length;
  for (auto& e : entries) {
    code <<= (e.length - len);
    len = e.length;
    e.code = static_cast<std::uint32_t>(code);
    ++code;
  }
}

class BitWriter {
 public:
  explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out) {}
  void put(std::uint32_t code, int len) {
    for (int i = len - 1; i >= 0; --i) {
      if (fill_ == 0) out_.push_back(0);
      if ((code >> i) & 1u) out_.back() |= static_cast<std::uint8_t>(0x80u >> fill_);
      fill_ = (fill_ + 1) % 8;
    }
  }

 private:
  std::vector<std::uint8_t>& out_;
  int fill_ = 0;
};

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

}  // namespace

std::vector<CodeEntry> build_canonical_code(std::span<const std::int16_t> symbols) {
  const auto hist = histogram(symbols);
  std::vector<CodeEntry> entries;
  if (hist.empty()) return entries;
  if (hist.size() == 1) {
    entries.push_back({hist.begin()->first, 1, 0});
    return entries;
  }

  // Two-queue Huffman. Leaves enter in ascending weight; among equal
  // weights the larger symbol value comes first, so the most frequent,
  // smallest symbols are merged last. A leaf wins ties against an internal
  // node, which keeps the tree shallow.
  struct Node {
    std::uint64_t weight;
    int left = -1, right = -1;
    std::int16_t symbol = 0;
  };
  std::vector<Node> nodes;
  for (const auto& [sym, count] : hist) nodes.push_back({count, -1, -1, sym});
  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) {
    return a.weight != b.weight ? a.weight < b.weight : a.symbol > b.symbol;
  });
  const std::size_t leaves = nodes.size();
  std::size_t next_leaf = 0, next_internal = leaves;
  auto pop = [&]() {
    if (next_leaf < leaves && (next_internal >= nodes.size() || nodes[next_leaf].weight <= nodes[next_internal].weight)) {
      return static_cast<int>(next_leaf++);
    }
    return static_cast<int>(next_internal++);
  };
  for (std::size_t merges = 0; merges + 1 < leaves; ++merges) {
    const int a = pop();
    const int b = pop();
    nodes.push_back({nodes[a].weight + nodes[b].weight, a, b, 0});
  }

  std::vector<int> depth(nodes.size(), 0);
  for (std::size_t i = nodes.size(); i-- > leaves;) {
    depth[nodes[i].left] = depth[i] + 1;
    depth[nodes[i].right] = depth[i] + 1;
  }
  for (std::size_t i = 0; i < leaves; ++i) {
    if (depth[i] > kMaxCodeLength) throw Error(ErrorCode::kInvalidArgument, "Huffman code longer than 32 bits");
    entries.push_back({nodes[i].symbol, depth[i], 0});
  }
  assign_codes(entries);
  return entries;
}

AlResidualStream huffman_encode(const ResidualSymbols& residual) {
  if (residual.symbols.empty()) throw Error(ErrorCode::kEmptyInput, "no symbols to encode");
  if (residual.symbols.size() > UINT16_MAX) throw Error(ErrorCode::kInvalidArgument, "more than 65535 symbols");
  if (residual.prec < 0 || residual.prec > 255) throw Error(ErrorCode::kInvalidArgument, "precision does not fit a byte");

  const std::vector<CodeEntry> code = build_canonical_code(residual.symbols);
  std::map<std::int16_t, const CodeEntry*> lookup;
  for (const auto& e : code) lookup.emplace(e.symbol, &e);

  AlResidualStream s;
  auto& out = s.bytes;
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  out.push_back(kStreamVersion);
  out.push_back(static_cast<std::uint8_t>(residual.prec));
  put_u16(out, static_cast<std::uint16_t>(residual.symbols.size()));
  put_u16(out, static_cast<std::uint16_t>(code.size()));
  for (const auto& e : code) {
    put_u16(out, static_cast<std::uint16_t>(e.symbol));
    out.push_back(static_cast<std::uint8_t>(e.length));
  }
  BitWriter bits(out);
  for (std::int16_t v : residual.symbols) {
    const CodeEntry& e = *lookup.at(v);
    bits.put(e.code, e.length);
  }
  return s;
}

ResidualSymbols huffman_decode(std::span<const std::uint8_t> b) {
  if (b.size() < 4) throw Error(ErrorCode::kTruncated, "stream shorter than its magic");
  if (std::memcmp(b.data(), kMagic, 4) != 0) throw Error(ErrorCode::kBadMagic, "not an ALRS stream");
  if (b.size() < kStreamFixedHeaderBytes) throw Error(ErrorCode::kTruncated, "stream header cut short");
  if (b[4] != kStreamVersion) throw Error(ErrorCode::kBadVersion, "unsupported stream version " + std::to_string(b[4]));

  ResidualSymbols out;
  out.prec = b[5];
  const std::size_t count = read_u16(b, 6);
  const std::size_t alphabet = read_u16(b, 8);
  if (alphabet == 0) throw Error(ErrorCode::kInvalidCodeTable, "empty code table");
  if (count == 0) throw Error(ErrorCode::kCorruptPayload, "stream declares no symbols");
  const std::size_t table_end = kStreamFixedHeaderBytes + 3 * alphabet;
  if (b.size() < table_end) throw Error(ErrorCode::kTruncated, "code table cut short");

  std::vector<CodeEntry> code(alphabet);
  std::set<std::int16_t> seen;
  std::uint64_t kraft = 0;  // in units of 2^-32
  for (std::size_t i = 0; i < alphabet; ++i) {
    const std::size_t at = kStreamFixedHeaderBytes + 3 * i;
    code[i].symbol = static_cast<std::int16_t>(read_u16(b, at));
    code[i].length = b[at + 2];
    if (code[i].length < 1 || code[i].length > kMaxCodeLength) {
      throw Error(ErrorCode::kInvalidCodeTable, "code length " + std::to_string(code[i].length));
    }
    if (i > 0) {
      const CodeEntry& p = code[i - 1];
      if (code[i].length < p.length || (code[i].length == p.length && code[i].symbol <= p.symbol)) {
        throw Error(ErrorCode::kInvalidCodeTable, "code table not in canonical order");
      }
    }
    if (!seen.insert(code[i].symbol).second) {
      throw Error(ErrorCode::kInvalidCodeTable, "symbol " + std::to_string(code[i].symbol) + " listed twice");
    }
    kraft += std::uint64_t{1} << (kMaxCodeLength - code[i].length);
  }
  if (kraft > (std::uint64_t{1} << kMaxCodeLength)) throw Error(ErrorCode::kInvalidCodeTable, "code lengths oversubscribed");
  assign_codes(code);

  // first code and index per length for canonical decoding
  std::vector<std::uint64_t> first(kMaxCodeLength + 2, 0);
  std::vector<std::size_t> first_index(kMaxCodeLength + 2, 0), per_len(kMaxCodeLength + 2, 0);
  for (const auto& e : code) ++per_len[e.length];
  {
    std::size_t idx = 0;
    for (int len = 1; len <= kMaxCodeLength; ++len) {
      first_index[len] = idx;
      if (per_len[len] > 0) first[len] = code[idx].code;
      idx += per_len[len];
    }
  }

  const auto payload = b.subspan(table_end);
  const std::size_t total_bits = payload.size() * 8;
  std::size_t pos = 0;
  out.symbols.reserve(count);
  while (out.symbols.size() < count) {
    std::uint64_t c = 0;
    int len = 0;
    for (;;) {
      if (pos >= total_bits) throw Error(ErrorCode::kTruncated, "payload ends inside a codeword");
      c = (c << 1) | ((payload[pos / 8] >> (7 - pos % 8)) & 1u);
      ++pos;
      ++len;
      if (per_len[len] > 0 && c >= first[len] && c - first[len] < per_len[len]) {
        out.symbols.push_back(code[first_index[len] + (c - first[len])].symbol);
        break;
      }
      if (len == code.back().length) throw Error(ErrorCode::kCorruptPayload, "bit pattern matches no codeword");
    }
  }
  if (payload.size() > (pos + 7) / 8) {
    throw Error(ErrorCode::kTrailingData, std::to_string(payload.size() - (pos + 7) / 8) + " bytes after payload");
  }
  return out;
}

std::size_t stream_size_bits(const AlResidualStream& s) { return 8 * s.bytes.size(); }

double entropy_bits(std::span<const std::int16_t> symbols) {
  const double n = static_cast<double>(symbols.size());
  double bits = 0.0;
  for (const auto& [sym, count] : histogram(symbols)) {
    const double p = static_cast<double>(count) / n;
    bits -= static_cast<double>(count) * std::log2(p);
  }
  return bits;
}

}  // namespace oldn
