#include "infosense/synthesis.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "infosense/operators.hpp"

namespace infosense {

Image synthesize_multires_image(std::size_t side, double alpha, std::uint64_t seed,
                                double pixel_std, double mean) {
  const std::size_t levels = dyadic_log2(side);
  if (levels == 0) throw std::invalid_argument("synthesize_multires_image: side must be >= 2");
  if (!(pixel_std > 0.0)) throw std::invalid_argument("synthesize_multires_image: pixel_std must be > 0");
  const double n = static_cast<double>(side);
  // Level l (1 coarsest) has 3 * 4^(l-1) coefficients of variance amp / 4^l.
  const double amp = pixel_std * pixel_std * n * n / (0.75 * static_cast<double>(levels));
  Image coeffs = Image::Zero(static_cast<Eigen::Index>(side), static_cast<Eigen::Index>(side));
  coeffs(0, 0) = mean * n;
  std::uint64_t stream = seed * 0x100000001b3ULL;
  for (std::size_t l = 1; l <= levels; ++l) {
    const std::size_t s = std::size_t{1} << (l - 1);
    const GGParams params(alpha, 0.0, std::sqrt(std::ldexp(amp, -2 * static_cast<int>(l))));
    const auto draws = gg_sample(params, 3 * s * s, stream + l);
    std::size_t k = 0;
    for (std::size_t r = 0; r < 2 * s; ++r)
      for (std::size_t c = 0; c < 2 * s; ++c)
        if (r >= s || c >= s) coeffs(r, c) = draws[k++];
  }
  return haar2_inverse(coeffs);
}

AlphaEstimate estimate_image_alpha(const Image& image) {
  const auto subbands = haar2_detail_subbands(haar2_forward(image));
  std::vector<double> pooled;
  for (const auto& band : subbands) {
    if (band.coefficients.size() < kMinSubbandForAlpha) continue;
    double sq = 0.0;
    for (double v : band.coefficients) sq += v * v;
    if (!(sq > 0.0)) continue;
    const double inv_rms = 1.0 / std::sqrt(sq / static_cast<double>(band.coefficients.size()));
    for (double v : band.coefficients) pooled.push_back(v * inv_rms);
  }
  if (pooled.empty()) throw std::invalid_argument("estimate_image_alpha: image has no detail energy");
  return estimate_alpha(pooled);
}

}  // namespace infosense
