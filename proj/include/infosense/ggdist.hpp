#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace infosense {

/// Generalized Gaussian GG(alpha, mu, sigma) parameterized by its standard
/// deviation, so that sigma^2 is the variance for every shape.
///
/// alpha = 2 is the normal distribution, alpha = 1 the Laplacian and
/// alpha < 2 gives increasingly sparse (peaked, heavy-tailed) densities.
class GGParams {
 public:
  GGParams(double alpha, double mu, double sigma);

  double alpha() const { return alpha_; }
  double mu() const { return mu_; }
  double sigma() const { return sigma_; }

  /// Gamma(1/alpha) / Gamma(3/alpha).
  double beta() const { return beta_; }

  /// sqrt(beta) * sigma, the scale inside exp(-|(x - mu)/scale|^alpha).
  double scale() const { return scale_; }

 private:
  double alpha_;
  double mu_;
  double sigma_;
  double beta_;
  double scale_;
};

/// Entropy of a zero-mean unit-variance Gaussian, 0.5 * ln(2 pi e).
double gaussian_shape_term();

double gg_pdf(double x, const GGParams& params);

/// Cumulative distribution function of GG(alpha, mu, sigma).
double gg_cdf(double x, const GGParams& params);

/// Differential entropy (nats) of the unit-variance GG(alpha), i.e. the
/// covariance-free part of the entropy. Maximal at alpha = 2.
double shape_term(double alpha);

/// Draws n samples with a std::mt19937_64 seeded by `seed`.
std::vector<double> gg_sample(const GGParams& params, std::size_t n, std::uint64_t seed);

struct NoisyShapeOptions {
  std::size_t initial_points = std::size_t{1} << 14;
  std::size_t max_points = std::size_t{1} << 22;
  /// Half-width of the grid in units of the combined standard deviation.
  double min_half_width = 12.0;
  /// Grid doubling stops when two successive entropies agree to this.
  double tolerance = 1e-4;
};

/// Shape term of sqrt(snr/(1+snr)) X + sqrt(1/(1+snr)) N with X ~ GG(alpha)
/// and N ~ N(0,1) independent, both unit variance.
///
/// Both densities are discretized into exact cell masses on a uniform grid,
/// convolved, and the entropy is taken as -sum m ln(m/h). The grid is doubled
/// until successive estimates agree to `tolerance` and the last pair is
/// Richardson-extrapolated; a std::runtime_error is thrown when `max_points`
/// is reached first.
double noisy_shape_term(double alpha, double snr, const NoisyShapeOptions& options = {});

/// E|X| / sqrt(E X^2) for unit-variance GG(alpha):
/// Gamma(2/alpha) / sqrt(Gamma(1/alpha) Gamma(3/alpha)).
double gg_abs_moment_ratio(double alpha);

struct AlphaEstimate {
  double alpha = 0.0;
  /// Set when the sample moment ratio fell outside the range reachable for
  /// alpha in [0.05, 10] and the estimate was clamped to an end point.
  bool clamped = false;
};

inline constexpr double kAlphaSearchMin = 0.05;
inline constexpr double kAlphaSearchMax = 10.0;

/// Moment-ratio estimate of the GG shape. Samples are centred on their mean.
/// Requires at least 100 non-constant samples.
AlphaEstimate estimate_alpha(std::span<const double> samples);

}  // namespace infosense
