#include "oldn/codec_sim/image_io.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

namespace oldn {
namespace {

struct PnmHeader {
  char kind = 0;  // '5' or '6'
  int width = 0;
  int height = 0;
  std::size_t data_offset = 0;
};

class HeaderParser {
 public:
  explicit HeaderParser(std::span<const std::uint8_t> b) : bytes_(b) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = static_cast<char>(bytes_[pos_]);
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        return;
      }
    }
  }

  int number() {
    skip_space_and_comments();
    long v = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1 << 20) throw Error(ErrorCode::kMalformedHeader, "PNM header value too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw Error(ErrorCode::kMalformedHeader, "expected a number in PNM header");
    return static_cast<int>(v);
  }

  std::size_t pos_ = 0;
  std::span<const std::uint8_t> bytes_;
};

PnmHeader parse_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw Error(ErrorCode::kMalformedHeader, "not a binary PGM/PPM file");
  }
  HeaderParser p(bytes);
  p.pos_ = 2;
  PnmHeader h;
  h.kind = static_cast<char>(bytes[1]);
  h.width = p.number();
  h.height = p.number();
  const int maxval = p.number();
  if (h.width < 1 || h.height < 1) throw Error(ErrorCode::kMalformedHeader, "empty PNM image");
  if (maxval != 255) {
    throw Error(ErrorCode::kUnsupportedFormat, "maxval " + std::to_string(maxval) + " (only 255 is supported)");
  }
  if (p.pos_ >= bytes.size() || !std::isspace(bytes[p.pos_])) {
    throw Error(ErrorCode::kMalformedHeader, "missing whitespace after maxval");
  }
  h.data_offset = p.pos_ + 1;
  return h;
}

std::vector<std::uint8_t> header(char kind, int w, int h) {
  const std::string s = std::string("P") + kind + "\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  return {s.begin(), s.end()};
}

std::span<const std::uint8_t> payload(std::span<const std::uint8_t> bytes, const PnmHeader& h, std::size_t expected) {
  const std::size_t have = bytes.size() - h.data_offset;
  if (have != expected) {
    throw Error(ErrorCode::kSizeMismatch,
                "PNM payload has " + std::to_string(have) + " bytes, expected " + std::to_string(expected));
  }
  return bytes.subspan(h.data_offset);
}

}  // namespace

std::vector<std::uint8_t> encode_pgm(const Plane& p) {
  auto out = header('5', p.width, p.height);
  out.insert(out.end(), p.samples.begin(), p.samples.end());
  return out;
}

Plane decode_pgm(std::span<const std::uint8_t> bytes) {
  const PnmHeader h = parse_header(bytes);
  if (h.kind != '5') throw Error(ErrorCode::kUnsupportedFormat, "expected P5");
  const auto data = payload(bytes, h, static_cast<std::size_t>(h.width) * h.height);
  Plane p(h.width, h.height);
  std::copy(data.begin(), data.end(), p.samples.begin());
  return p;
}

std::vector<std::uint8_t> encode_ppm(const RgbImage& image) {
  auto out = header('6', image.width, image.height);
  out.insert(out.end(), image.rgb.begin(), image.rgb.end());
  return out;
}

RgbImage decode_ppm(std::span<const std::uint8_t> bytes) {
  const PnmHeader h = parse_header(bytes);
  if (h.kind != '6') throw Error(ErrorCode::kUnsupportedFormat, "expected P6");
  const auto data = payload(bytes, h, static_cast<std::size_t>(h.width) * h.height * 3);
  RgbImage img(h.width, h.height);
  std::copy(data.begin(), data.end(), img.rgb.begin());
  return img;
}

std::vector<std::uint8_t> encode_yuv420(const Yuv420Frame& frame) {
  frame.validate();
  std::vector<std::uint8_t> out;
  out.reserve(frame.y.samples.size() * 3 / 2);
  for (const Plane* p : {&frame.y, &frame.u, &frame.v}) out.insert(out.end(), p->samples.begin(), p->samples.end());
  return out;
}

Yuv420Frame decode_yuv420(std::span<const std::uint8_t> bytes, int width, int height) {
  if (width < 2 || height < 2 || width % 2 != 0 || height % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument, "raw YUV420 needs positive even width and height");
  }
  const std::size_t luma = static_cast<std::size_t>(width) * height;
  const std::size_t chroma = luma / 4;
  if (bytes.size() != luma + 2 * chroma) {
    throw Error(ErrorCode::kSizeMismatch, "raw YUV420 has " + std::to_string(bytes.size()) + " bytes, expected " +
                                              std::to_string(luma + 2 * chroma));
  }
  Yuv420Frame f{Plane(width, height), Plane(width / 2, height / 2), Plane(width / 2, height / 2)};
  auto it = bytes.begin();
  std::copy_n(it, luma, f.y.samples.begin());
  std::copy_n(it + static_cast<std::ptrdiff_t>(luma), chroma, f.u.samples.begin());
  std::copy_n(it + static_cast<std::ptrdiff_t>(luma + chroma), chroma, f.v.samples.begin());
  return f;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

void save_pgm(const std::filesystem::path& path, const Plane& p) { write_file(path, encode_pgm(p)); }
Plane load_pgm(const std::filesystem::path& path) { return decode_pgm(read_file(path)); }
void save_ppm(const std::filesystem::path& path, const RgbImage& image) { write_file(path, encode_ppm(image)); }
RgbImage load_ppm(const std::filesystem::path& path) { return decode_ppm(read_file(path)); }
void save_yuv420(const std::filesystem::path& path, const Yuv420Frame& frame) {
  write_file(path, encode_yuv420(frame));
}
Yuv420Frame load_yuv420(const std::filesystem::path& path, int width, int height) {
  return decode_yuv420(read_file(path), width, height);
}

RgbImage load_rgb_image(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  const PnmHeader h = parse_header(bytes);
  if (h.kind == '6') return decode_ppm(bytes);
  const Plane gray = decode_pgm(bytes);
  RgbImage img(gray.width, gray.height);
  for (std::size_t i = 0; i < gray.samples.size(); ++i) {
    img.rgb[3 * i] = img.rgb[3 * i + 1] = img.rgb[3 * i + 2] = gray.samples[i];
  }
  return img;
}

}  // namespace oldn
