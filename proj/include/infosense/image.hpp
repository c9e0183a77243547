#pragma once

#include <cstddef>
#include <filesystem>
#include <span>

#include <Eigen/Core>

namespace infosense {

/// Grayscale raster, row-major so that the flat index of pixel (r, c) is
/// r * width + c. Values are real-valued; only PGM output clamps.
using Image = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Eigen::Map<const Eigen::VectorXd> flatten(const Image& image) {
  return {image.data(), image.size()};
}

inline Image unflatten(const Eigen::VectorXd& v, std::size_t rows, std::size_t cols) {
  return Eigen::Map<const Image>(v.data(), static_cast<Eigen::Index>(rows),
                                 static_cast<Eigen::Index>(cols));
}

/// Reads a binary (P5) PGM. 16-bit files (maxval > 255) are accepted; values
/// are rescaled to the 0..255 range.
Image read_pgm(const std::filesystem::path& path);

/// Writes an 8-bit binary PGM, rounding and clamping to [0, peak] with
/// maxval 255 (values are scaled by 255 / peak).
void write_pgm(const std::filesystem::path& path, const Image& image, double peak = 255.0);

bool is_power_of_two(std::size_t n);

/// log2(n); throws std::invalid_argument unless n is a power of two.
std::size_t dyadic_log2(std::size_t n);

}  // namespace infosense
