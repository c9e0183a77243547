#pragma once

#include <cstddef>
#include <cstdint>

#include "infosense/ggdist.hpp"
#include "infosense/image.hpp"

namespace infosense {

/// Random side x side image whose orthonormal Haar coefficients are
/// independent GG(alpha): the approximation coefficient is mean * side and
/// every detail level carries the same expected energy, so the per-pixel
/// standard deviation is pixel_std and coefficient variances fall as 4^-l
/// from coarse to fine.
Image synthesize_multires_image(std::size_t side, double alpha, std::uint64_t seed,
                                double pixel_std = 40.0, double mean = 128.0);

/// Haar subbands smaller than this are left out of the pooled estimate.
inline constexpr std::size_t kMinSubbandForAlpha = 64;

/// Shape estimate from the image's Haar detail coefficients, each subband
/// scaled to unit RMS before pooling.
AlphaEstimate estimate_image_alpha(const Image& image);

}  // namespace infosense
