#include "infosense/image.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace infosense {

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string token;
  char c = 0;
  while (in.get(c)) {
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(c);
  }
  return token;
}

std::size_t parse_header_value(std::istream& in, const char* what) {
  const std::string token = next_token(in);
  try {
    std::size_t consumed = 0;
    const unsigned long value = std::stoul(token, &consumed);
    if (consumed != token.size()) throw std::invalid_argument(token);
    return value;
  } catch (const std::exception&) {
    throw std::runtime_error(std::string("PGM: bad ") + what + " '" + token + "'");
  }
}

}  // namespace

bool is_power_of_two(std::size_t n) { return std::has_single_bit(n); }

std::size_t dyadic_log2(std::size_t n) {
  if (!is_power_of_two(n)) {
    throw std::invalid_argument("dimension " + std::to_string(n) + " is not a power of two");
  }
  return static_cast<std::size_t>(std::countr_zero(n));
}

Image read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("PGM: cannot open " + path.string());
  if (next_token(in) != "P5") throw std::runtime_error("PGM: " + path.string() + " is not binary P5");
  const std::size_t width = parse_header_value(in, "width");
  const std::size_t height = parse_header_value(in, "height");
  const std::size_t maxval = parse_header_value(in, "maxval");
  if (width == 0 || height == 0 || maxval == 0 || maxval > 65535) {
    throw std::runtime_error("PGM: invalid header in " + path.string());
  }
  const std::size_t bytes_per_pixel = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(width * height * bytes_per_pixel);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw std::runtime_error("PGM: truncated pixel data in " + path.string());
  }
  Image image(static_cast<Eigen::Index>(height), static_cast<Eigen::Index>(width));
  const double scale = 255.0 / static_cast<double>(maxval);
  for (std::size_t i = 0; i < width * height; ++i) {
    const unsigned value = bytes_per_pixel == 1 ? raw[i] : (raw[2 * i] << 8) | raw[2 * i + 1];
    image.data()[i] = static_cast<double>(value) * scale;
  }
  return image;
}

void write_pgm(const std::filesystem::path& path, const Image& image, double peak) {
  if (!(peak > 0.0)) throw std::invalid_argument("write_pgm: peak must be > 0");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("PGM: cannot write " + path.string());
  out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
  std::vector<unsigned char> raw(static_cast<std::size_t>(image.size()));
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double v = std::clamp(image.data()[i], 0.0, peak) * (255.0 / peak);
    raw[i] = static_cast<unsigned char>(std::lround(v));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw std::runtime_error("PGM: write failed for " + path.string());
}

}  // namespace infosense
