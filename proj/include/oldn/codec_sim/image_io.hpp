#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "oldn/codec_sim/plane.hpp"

namespace oldn {

// Binary PGM (P5) and PPM (P6) with maxval 255; raw planar 8-bit YUV 4:2:0
// (Y plane, then U, then V).

std::vector<std::uint8_t> encode_pgm(const Plane& p);
Plane decode_pgm(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_ppm(const RgbImage& image);
RgbImage decode_ppm(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_yuv420(const Yuv420Frame& frame);
Yuv420Frame decode_yuv420(std::span<const std::uint8_t> bytes, int width, int height);

void save_pgm(const std::filesystem::path& path, const Plane& p);
Plane load_pgm(const std::filesystem::path& path);
void save_ppm(const std::filesystem::path& path, const RgbImage& image);
RgbImage load_ppm(const std::filesystem::path& path);
void save_yuv420(const std::filesystem::path& path, const Yuv420Frame& frame);
Yuv420Frame load_yuv420(const std::filesystem::path& path, int width, int height);

// P6 as-is, P5 replicated to three channels.
RgbImage load_rgb_image(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace oldn
