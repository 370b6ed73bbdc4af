#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace gymgate::sim {

// Netpbm dumps for inspection: depth as binary PGM (P5, maxval 65535,
// big-endian samples as the format requires), RGB as binary PPM (P6).

template <typename Sample>
struct Image {
  int width = 0;
  int height = 0;
  std::vector<Sample> data;  // row-major; interleaved for multi-channel images
};

void write_depth_pgm(const std::filesystem::path& path, int width, int height, std::span<const std::uint16_t> depth);
void write_rgb_ppm(const std::filesystem::path& path, int width, int height, std::span<const std::uint8_t> rgb);

Image<std::uint16_t> read_depth_pgm(const std::filesystem::path& path);
Image<std::uint8_t> read_rgb_ppm(const std::filesystem::path& path);

}  // namespace gymgate::sim
