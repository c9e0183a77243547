#include "infosense/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

#include <boost/math/special_functions/digamma.hpp>

#include "infosense/ggdist.hpp"
#include "kdtree.hpp"

namespace infosense {

namespace {

void require_count_range(std::size_t p, std::size_t d, const char* what) {
  if (p < 1 || p > d) {
    throw std::invalid_argument(std::string(what) + ": require 1 <= p <= d");
  }
}

double log_choose(std::size_t n, std::size_t k) {
  const auto nd = static_cast<double>(n);
  const auto kd = static_cast<double>(k);
  return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0);
}

double white_gap(double alpha, std::size_t d, std::size_t p) {
  return random_entropy_white(alpha, d, p) - pca_entropy_white(alpha, p);
}

// log of the unit-ball volume in `dim` dimensions.
double log_unit_ball_volume(std::size_t dim) {
  const double half = 0.5 * static_cast<double>(dim);
  return half * std::log(std::numbers::pi) - std::lgamma(half + 1.0);
}

template <std::size_t Dim>
std::vector<double> kth_distances(std::span<const double> points, std::size_t dim, std::size_t k) {
  return detail::KdTree<Dim>(points, dim).kth_neighbor_sq_distances(k);
}

KnnEntropyResult knn_entropy_once(std::span<const double> points, std::size_t dim, std::size_t k) {
  const std::size_t n = points.size() / dim;
  std::vector<double> dist2;
  switch (dim) {
    case 1: dist2 = kth_distances<1>(points, dim, k); break;
    case 2: dist2 = kth_distances<2>(points, dim, k); break;
    case 3: dist2 = kth_distances<3>(points, dim, k); break;
    case 4: dist2 = kth_distances<4>(points, dim, k); break;
    case 5: dist2 = kth_distances<5>(points, dim, k); break;
    case 6: dist2 = kth_distances<6>(points, dim, k); break;
    case 7: dist2 = kth_distances<7>(points, dim, k); break;
    case 8: dist2 = kth_distances<8>(points, dim, k); break;
    default: dist2 = kth_distances<0>(points, dim, k); break;
  }
  double log_sum = 0.0;
  for (double d2 : dist2) {
    if (!(d2 > 0.0)) return {0.0, true};
    log_sum += 0.5 * std::log(d2);
  }
  const double nd = static_cast<double>(n);
  const double entropy = boost::math::digamma(nd) - boost::math::digamma(static_cast<double>(k)) +
                         log_unit_ball_volume(dim) + static_cast<double>(dim) * log_sum / nd;
  return {entropy, false};
}

}  // namespace

SpectrumProfile::SpectrumProfile(std::vector<double> variances) : variances_(std::move(variances)) {
  if (variances_.empty()) throw std::invalid_argument("SpectrumProfile: empty spectrum");
  for (std::size_t i = 0; i < variances_.size(); ++i) {
    if (!(variances_[i] > 0.0) || !std::isfinite(variances_[i])) {
      throw std::invalid_argument("SpectrumProfile: variances must be finite and > 0");
    }
    if (i > 0 && variances_[i] > variances_[i - 1]) {
      throw std::invalid_argument("SpectrumProfile: variances must be non-increasing");
    }
  }
}

SpectrumProfile SpectrumProfile::power_law(double gamma, std::size_t d) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("SpectrumProfile::power_law: gamma must be >= 0");
  }
  std::vector<double> v(d);
  for (std::size_t k = 0; k < d; ++k) v[k] = std::pow(static_cast<double>(k + 1), -gamma);
  return SpectrumProfile(std::move(v));
}

KnnEntropyResult knn_entropy(std::span<const double> points, std::size_t dim,
                             std::size_t k_neighbors) {
  if (dim == 0) throw std::invalid_argument("knn_entropy: dimension must be >= 1");
  if (k_neighbors == 0) throw std::invalid_argument("knn_entropy: k_neighbors must be >= 1");
  if (points.size() % dim != 0) {
    throw std::invalid_argument("knn_entropy: point buffer size is not a multiple of dim");
  }
  const std::size_t n = points.size() / dim;
  if (n < 50) throw std::invalid_argument("knn_entropy: need at least 50 samples");
  if (k_neighbors >= n) throw std::invalid_argument("knn_entropy: k_neighbors must be < n");
  for (double v : points) {
    if (!std::isfinite(v)) throw std::invalid_argument("knn_entropy: non-finite coordinate");
  }

  auto result = knn_entropy_once(points, dim, k_neighbors);
  if (!result.perturbed) return result;

  // Coincident points: jitter every coordinate by a tiny fraction of its
  // spread, deterministically, and estimate again.
  std::vector<double> jittered(points.begin(), points.end());
  std::mt19937_64 rng(0x5eedULL);
  for (std::size_t d = 0; d < dim; ++d) {
    double lo = points[d];
    double hi = points[d];
    for (std::size_t i = 0; i < n; ++i) {
      lo = std::min(lo, points[i * dim + d]);
      hi = std::max(hi, points[i * dim + d]);
    }
    const double amplitude = 1e-10 * std::max(hi - lo, 1.0);
    std::uniform_real_distribution<double> noise(-amplitude, amplitude);
    for (std::size_t i = 0; i < n; ++i) jittered[i * dim + d] += noise(rng);
  }
  result = knn_entropy_once(jittered, dim, k_neighbors);
  if (result.perturbed) throw std::runtime_error("knn_entropy: coincident points after jitter");
  result.perturbed = true;
  return result;
}

double random_entropy_white(double alpha, std::size_t d, std::size_t p) {
  if (d < 2) throw std::invalid_argument("random_entropy_white: d must be >= 2");
  require_count_range(p, d, "random_entropy_white");
  const double c2 = gaussian_shape_term();
  const auto pd = static_cast<double>(p);
  return pd * c2 - pd * (pd - 1.0) / static_cast<double>(d - 1) * (c2 - shape_term(alpha));
}

double pca_entropy_white(double alpha, std::size_t p) {
  if (p < 1) throw std::invalid_argument("pca_entropy_white: p must be >= 1");
  return static_cast<double>(p) * shape_term(alpha);
}

double individual_capacity(double alpha, std::size_t d, std::size_t k) {
  if (d < 2) throw std::invalid_argument("individual_capacity: d must be >= 2");
  if (k < 1 || k > d) throw std::invalid_argument("individual_capacity: require 1 <= k <= d");
  const double c2 = gaussian_shape_term();
  return c2 - 2.0 * static_cast<double>(k - 1) / static_cast<double>(d - 1) *
                  (c2 - shape_term(alpha));
}

std::vector<double> log_subvolume_expectations(std::span<const double> lambdas,
                                               std::size_t p_max) {
  const std::size_t d = lambdas.size();
  require_count_range(p_max, d, "log_subvolume_expectations");
  for (double l : lambdas) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw std::invalid_argument("log_subvolume_expectations: lambdas must be finite and > 0");
    }
  }

  // S_j = mantissa[j] * exp(exponent[j]); ratio[j] = exp(exponent[j-1] - exponent[j]).
  constexpr double kRenormAbove = 1e200;
  const double renorm_log = std::log(kRenormAbove);
  std::vector<double> mantissa(p_max + 1, 0.0);
  std::vector<double> exponent(p_max + 1, 0.0);
  std::vector<double> ratio(p_max + 1, 1.0);
  mantissa[0] = 1.0;
  std::size_t live = 0;  // highest order with a non-zero sum

  for (std::size_t m = 0; m < d; ++m) {
    const double lambda = lambdas[m];
    if (live < p_max) {
      // First contribution to order live+1: S_{live+1} = lambda * S_live.
      const std::size_t j = live + 1;
      exponent[j] = exponent[live] + std::log(mantissa[live] * lambda);
      mantissa[j] = 0.0;
      ratio[j] = std::exp(exponent[live] - exponent[j]);
    }
    const std::size_t top = std::min(live + 1, p_max);
    for (std::size_t j = top; j >= 1; --j) {
      mantissa[j] += lambda * ratio[j] * mantissa[j - 1];
      if (mantissa[j] > kRenormAbove) {
        mantissa[j] /= kRenormAbove;
        exponent[j] += renorm_log;
        ratio[j] = std::exp(exponent[j - 1] - exponent[j]);
        if (j + 1 <= top) ratio[j + 1] = std::exp(exponent[j] - exponent[j + 1]);
      }
    }
    live = top;
  }

  std::vector<double> out(p_max);
  for (std::size_t p = 1; p <= p_max; ++p) {
    out[p - 1] = std::log(mantissa[p]) + exponent[p] - log_choose(d, p);
  }
  return out;
}

double log_subvolume_expectation(std::span<const double> lambdas, std::size_t p) {
  require_count_range(p, lambdas.size(), "log_subvolume_expectation");
  return log_subvolume_expectations(lambdas, p).back();
}

double subvolume_expectation(std::span<const double> lambdas, std::size_t p) {
  const double value = std::exp(log_subvolume_expectation(lambdas, p));
  if (!std::isfinite(value) || !(value > 0.0)) {
    throw std::range_error("subvolume_expectation: result not representable; use the log form");
  }
  return value;
}

std::vector<double> random_entropy_gaussian_powerlaw_curve(double gamma, std::size_t d,
                                                           std::size_t p_max) {
  require_count_range(p_max, d, "random_entropy_gaussian_powerlaw");
  const auto spectrum = SpectrumProfile::power_law(gamma, d);
  auto curve = log_subvolume_expectations(spectrum.variances(), p_max);
  const double c2 = gaussian_shape_term();
  for (std::size_t p = 1; p <= p_max; ++p) {
    curve[p - 1] = static_cast<double>(p) * c2 + 0.5 * curve[p - 1];
  }
  return curve;
}

double random_entropy_gaussian_powerlaw(double gamma, std::size_t d, std::size_t p) {
  return random_entropy_gaussian_powerlaw_curve(gamma, d, p).back();
}

double pca_entropy_gaussian_powerlaw(double gamma, std::size_t p) {
  if (p < 1) throw std::invalid_argument("pca_entropy_gaussian_powerlaw: p must be >= 1");
  if (!(gamma >= 0.0)) throw std::invalid_argument("pca_entropy_gaussian_powerlaw: gamma must be >= 0");
  // sum_{k<=p} ln k = ln p!
  return static_cast<double>(p) * gaussian_shape_term() -
         0.5 * gamma * std::lgamma(static_cast<double>(p) + 1.0);
}

std::vector<double> hybrid_gap_curve(double alpha, double gamma, std::size_t d,
                                     std::size_t p_max) {
  auto curve = random_entropy_gaussian_powerlaw_curve(gamma, d, p_max);
  for (std::size_t p = 1; p <= p_max; ++p) {
    curve[p - 1] += white_gap(alpha, d, p) - pca_entropy_gaussian_powerlaw(gamma, p);
  }
  return curve;
}

double hybrid_gap(double alpha, double gamma, std::size_t d, std::size_t p) {
  return hybrid_gap_curve(alpha, gamma, d, p).back();
}

void EntropyCurve::validate() const {
  if (p_values.size() != entropies.size()) {
    throw std::invalid_argument("EntropyCurve: p_values and entropies differ in length");
  }
  for (double e : entropies) {
    if (!std::isfinite(e)) throw std::invalid_argument("EntropyCurve: non-finite entropy");
  }
}

void write_entropy_curves_csv(std::ostream& out, std::span<const EntropyCurve> curves,
                              std::string_view provenance) {
  out << "# " << provenance << '\n' << "p,scheme,entropy_nats\n";
  out.precision(17);
  for (const auto& curve : curves) {
    curve.validate();
    for (std::size_t i = 0; i < curve.p_values.size(); ++i) {
      out << curve.p_values[i] << ',' << curve.scheme << ',' << curve.entropies[i] << '\n';
    }
  }
}

Eigen::MatrixXd random_orthonormal_rows(std::size_t p, std::size_t d, std::uint64_t seed) {
  require_count_range(p, d, "random_orthonormal_rows");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(p));
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(g.rows(), g.cols());
  const Eigen::MatrixXd r = qr.matrixQR().topRows(g.cols()).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q.transpose();
}

}  // namespace infosense
