#include "gymgate/sim/image_io.hpp"

#include <cctype>
#include <fstream>
#include <string>

#include "gymgate/error.hpp"

namespace gymgate::sim {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  return out;
}

void check_size(std::size_t got, std::size_t want, const std::filesystem::path& path) {
  if (got != want) throw Error(ErrorCode::IoFailure, "plane size does not match dimensions for " + path.string());
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string token(std::istream& in) {
  std::string out;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  while (c != EOF && !std::isspace(c)) {
    out.push_back(static_cast<char>(c));
    c = in.get();
  }
  return out;  // the single whitespace after the maxval is consumed here
}

struct Header {
  int width;
  int height;
  int maxval;
};

Header read_header(std::istream& in, const char* magic, const std::filesystem::path& path) {
  try {
    if (token(in) != magic) throw Error(ErrorCode::IoFailure, path.string() + " is not a " + magic + " file");
    Header h{std::stoi(token(in)), std::stoi(token(in)), std::stoi(token(in))};
    if (h.width <= 0 || h.height <= 0 || h.maxval <= 0 || h.maxval > 65535) {
      throw Error(ErrorCode::IoFailure, "bad netpbm header in " + path.string());
    }
    return h;
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::IoFailure, "bad netpbm header in " + path.string());
  }
}

}  // namespace

void write_depth_pgm(const std::filesystem::path& path, int width, int height, std::span<const std::uint16_t> depth) {
  check_size(depth.size(), static_cast<std::size_t>(width) * height, path);
  auto out = open_out(path);
  out << "P5\n" << width << ' ' << height << "\n65535\n";
  std::vector<char> bytes;
  bytes.reserve(depth.size() * 2);
  for (std::uint16_t d : depth) {
    bytes.push_back(static_cast<char>(d >> 8));
    bytes.push_back(static_cast<char>(d & 0xff));
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

void write_rgb_ppm(const std::filesystem::path& path, int width, int height, std::span<const std::uint8_t> rgb) {
  check_size(rgb.size(), static_cast<std::size_t>(width) * height * 3, path);
  auto out = open_out(path);
  out << "P6\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

Image<std::uint16_t> read_depth_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  const Header h = read_header(in, "P5", path);
  if (h.maxval < 256) throw Error(ErrorCode::IoFailure, "expected a 16-bit PGM in " + path.string());
  Image<std::uint16_t> image{h.width, h.height, {}};
  const std::size_t n = static_cast<std::size_t>(h.width) * h.height;
  std::vector<unsigned char> bytes(n * 2);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw Error(ErrorCode::IoFailure, "truncated pixel data in " + path.string());
  }
  image.data.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    image.data[i] = static_cast<std::uint16_t>((bytes[2 * i] << 8) | bytes[2 * i + 1]);
  }
  return image;
}

Image<std::uint8_t> read_rgb_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  const Header h = read_header(in, "P6", path);
  if (h.maxval > 255) throw Error(ErrorCode::IoFailure, "expected an 8-bit PPM in " + path.string());
  Image<std::uint8_t> image{h.width, h.height, std::vector<std::uint8_t>(static_cast<std::size_t>(h.width) * h.height * 3)};
  in.read(reinterpret_cast<char*>(image.data.data()), static_cast<std::streamsize>(image.data.size()));
  if (in.gcount() != static_cast<std::streamsize>(image.data.size())) {
    throw Error(ErrorCode::IoFailure, "truncated pixel data in " + path.string());
  }
  return image;
}

}  // namespace gymgate::sim
