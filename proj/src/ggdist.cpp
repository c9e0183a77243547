#include "infosense/ggdist.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>
#include <unsupported/Eigen/FFT>

namespace infosense {

namespace {

void require_shape(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("GG shape parameter alpha must be finite and > 0");
  }
}

// ln(Gamma(1/alpha) / Gamma(3/alpha)); log-gamma keeps small alpha finite.
double log_beta(double alpha) { return std::lgamma(1.0 / alpha) - std::lgamma(3.0 / alpha); }

double normal_cdf(double x, double stddev) {
  return 0.5 * std::erfc(-x / (stddev * std::numbers::sqrt2));
}

// Probability mass of each of the n cells [lo + i h, lo + (i+1) h].
template <typename Cdf>
std::vector<double> cell_masses(double lo, double h, std::size_t n, Cdf&& cdf) {
  std::vector<double> masses(n);
  double left = cdf(lo);
  for (std::size_t i = 0; i < n; ++i) {
    const double right = cdf(lo + h * static_cast<double>(i + 1));
    masses[i] = std::max(0.0, right - left);
    left = right;
  }
  return masses;
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t out_len = a.size() + b.size() - 1;
  std::vector<double> out(out_len, 0.0);
  if (std::min(a.size(), b.size()) <= 64) {
    const auto& longer = a.size() >= b.size() ? a : b;
    const auto& shorter = a.size() >= b.size() ? b : a;
    for (std::size_t j = 0; j < shorter.size(); ++j) {
      const double w = shorter[j];
      if (w == 0.0) continue;
      for (std::size_t i = 0; i < longer.size(); ++i) out[i + j] += w * longer[i];
    }
    return out;
  }
  std::size_t fft_len = 1;
  while (fft_len < out_len) fft_len <<= 1;
  std::vector<double> pa(a), pb(b);
  pa.resize(fft_len, 0.0);
  pb.resize(fft_len, 0.0);
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> fa, fb;
  fft.fwd(fa, pa);
  fft.fwd(fb, pb);
  for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
  std::vector<double> full;
  fft.inv(full, fa);
  for (std::size_t i = 0; i < out_len; ++i) out[i] = std::max(0.0, full[i]);
  return out;
}

double histogram_entropy(const std::vector<double>& masses, double h) {
  double total = 0.0;
  for (double m : masses) total += m;
  double entropy = 0.0;
  for (double m : masses) {
    if (m <= 0.0) continue;
    const double q = m / total;
    entropy -= q * std::log(q / h);
  }
  return entropy;
}

// Cell masses of GG(signal) on n cells starting at lo. Exact CDF differences
// near the mode, Simpson's rule on the density elsewhere.
std::vector<double> signal_cell_masses(const GGParams& signal, double lo, double h, std::size_t n) {
  constexpr double kExactCells = 32.0;
  const double alpha = signal.alpha();
  const double inv_scale = 1.0 / signal.scale();
  const double log_norm = std::log(alpha / (2.0 * signal.scale())) - std::lgamma(1.0 / alpha);
  auto pdf = [&](double x) {
    return std::exp(log_norm - std::pow(std::abs(x - signal.mu()) * inv_scale, alpha));
  };
  std::vector<double> masses(n);
  double left_pdf = pdf(lo);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = lo + h * static_cast<double>(i);
    const double right = left + h;
    const double right_pdf = pdf(right);
    const double centre = left + 0.5 * h;
    if (std::abs(centre - signal.mu()) < kExactCells * h) {
      masses[i] = std::max(0.0, gg_cdf(right, signal) - gg_cdf(left, signal));
    } else {
      masses[i] = h / 6.0 * (left_pdf + 4.0 * pdf(centre) + right_pdf);
    }
    left_pdf = right_pdf;
  }
  return masses;
}

// Entropy of a*X + b*N on a grid of n cells spanning [-half_width, half_width].
double noisy_entropy_on_grid(const GGParams& signal, double noise_std, double half_width,
                             std::size_t n) {
  const double h = 2.0 * half_width / static_cast<double>(n);
  auto signal_masses = signal_cell_masses(signal, -half_width, h, n);
  if (noise_std <= 0.0) return histogram_entropy(signal_masses, h);

  // Noise kernel centred on cell 0, spanning +-12 standard deviations.
  const auto half = static_cast<std::size_t>(std::ceil(12.0 * noise_std / h));
  const double kernel_lo = -(static_cast<double>(half) + 0.5) * h;
  auto kernel = cell_masses(kernel_lo, h, 2 * half + 1,
                            [&](double x) { return normal_cdf(x, noise_std); });
  return histogram_entropy(convolve(signal_masses, kernel), h);
}

}  // namespace

GGParams::GGParams(double alpha, double mu, double sigma) : alpha_(alpha), mu_(mu), sigma_(sigma) {
  require_shape(alpha);
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("GG standard deviation sigma must be finite and > 0");
  }
  if (!std::isfinite(mu)) throw std::invalid_argument("GG mean mu must be finite");
  beta_ = std::exp(log_beta(alpha));
  if (!std::isfinite(beta_) || !(beta_ > 0.0)) {
    throw std::invalid_argument("GG beta is not representable for this alpha");
  }
  scale_ = sigma_ * std::exp(0.5 * log_beta(alpha));
}

double gaussian_shape_term() { return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e); }

double gg_pdf(double x, const GGParams& params) {
  if (!std::isfinite(x)) throw std::invalid_argument("gg_pdf: x must be finite");
  const double alpha = params.alpha();
  const double z = std::abs(x - params.mu()) / params.scale();
  const double log_norm = std::log(alpha / (2.0 * params.scale())) - std::lgamma(1.0 / alpha);
  return std::exp(log_norm - std::pow(z, alpha));
}

double gg_cdf(double x, const GGParams& params) {
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  const double alpha = params.alpha();
  const double z = std::abs(x - params.mu()) / params.scale();
  // P(|X - mu| <= t) = P(1/alpha, (t/scale)^alpha)
  const double central = boost::math::gamma_p(1.0 / alpha, std::pow(z, alpha));
  return x >= params.mu() ? 0.5 + 0.5 * central : 0.5 - 0.5 * central;
}

double shape_term(double alpha) {
  require_shape(alpha);
  const double a = 1.0 / alpha;
  return 0.5 * (std::log(4.0) - 2.0 * std::log(alpha) + 3.0 * std::lgamma(a) -
                std::lgamma(3.0 * a)) +
         a;
}

std::vector<double> gg_sample(const GGParams& params, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("gg_sample: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> energy(1.0 / params.alpha(), 1.0);
  std::bernoulli_distribution sign(0.5);
  const double inv_alpha = 1.0 / params.alpha();
  std::vector<double> out(n);
  for (auto& v : out) {
    // |X - mu| / scale raised to alpha is Gamma(1/alpha, 1).
    const double magnitude = params.scale() * std::pow(energy(rng), inv_alpha);
    v = params.mu() + (sign(rng) ? magnitude : -magnitude);
  }
  return out;
}

double noisy_shape_term(double alpha, double snr, const NoisyShapeOptions& options) {
  require_shape(alpha);
  if (std::isnan(snr) || snr < 0.0) throw std::invalid_argument("noisy_shape_term: snr must be >= 0");
  if (snr == 0.0 || alpha == 2.0) return gaussian_shape_term();
  if (std::isinf(snr)) return shape_term(alpha);

  const double signal_std = std::sqrt(snr / (1.0 + snr));
  const double noise_std = std::sqrt(1.0 / (1.0 + snr));
  const GGParams signal(alpha, 0.0, signal_std);

  // Extend the grid past the GG tail quantile so that at most 1e-9 of the
  // signal mass falls outside.
  const double tail_energy = boost::math::gamma_q_inv(1.0 / alpha, 1e-9);
  const double signal_reach = signal.scale() * std::pow(tail_energy, 1.0 / alpha);
  const double half_width = std::max(options.min_half_width, signal_reach + 12.0 * noise_std);

  // The histogram entropy error is O(h^2); once successive grids agree,
  // Richardson-extrapolate the last pair.
  std::size_t n = options.initial_points;
  double previous = noisy_entropy_on_grid(signal, noise_std, half_width, n);
  while (2 * n <= options.max_points) {
    n *= 2;
    const double current = noisy_entropy_on_grid(signal, noise_std, half_width, n);
    const double delta = current - previous;
    if (std::abs(delta) < options.tolerance) return current + delta / 3.0;
    previous = current;
  }
  std::ostringstream msg;
  msg << "noisy_shape_term: grid did not converge for alpha=" << alpha << " snr=" << snr
      << " (last estimate " << previous << " at " << n << " points, half width " << half_width
      << ")";
  throw std::runtime_error(msg.str());
}

double gg_abs_moment_ratio(double alpha) {
  require_shape(alpha);
  const double a = 1.0 / alpha;
  return std::exp(std::lgamma(2.0 * a) - 0.5 * (std::lgamma(a) + std::lgamma(3.0 * a)));
}

AlphaEstimate estimate_alpha(std::span<const double> samples) {
  if (samples.size() < 100) throw std::invalid_argument("estimate_alpha: need at least 100 samples");
  double mean = 0.0;
  for (double v : samples) {
    if (!std::isfinite(v)) throw std::invalid_argument("estimate_alpha: non-finite sample");
    mean += v;
  }
  mean /= static_cast<double>(samples.size());
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  for (double v : samples) {
    abs_sum += std::abs(v - mean);
    sq_sum += (v - mean) * (v - mean);
  }
  if (!(sq_sum > 0.0)) throw std::invalid_argument("estimate_alpha: samples are constant");
  const double count = static_cast<double>(samples.size());
  const double ratio = (abs_sum / count) / std::sqrt(sq_sum / count);

  const double lo_ratio = gg_abs_moment_ratio(kAlphaSearchMin);
  const double hi_ratio = gg_abs_moment_ratio(kAlphaSearchMax);
  if (ratio <= lo_ratio) return {kAlphaSearchMin, true};
  if (ratio >= hi_ratio) return {kAlphaSearchMax, true};

  // The ratio is increasing in alpha; solve in log(alpha) for a better
  // conditioned bracket.
  auto f = [ratio](double log_alpha) { return gg_abs_moment_ratio(std::exp(log_alpha)) - ratio; };
  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t max_iter = 200;
  auto [lo, hi] = boost::math::tools::toms748_solve(f, std::log(kAlphaSearchMin),
                                                   std::log(kAlphaSearchMax), tol, max_iter);
  return {std::exp(0.5 * (lo + hi)), false};
}

}  // namespace infosense
