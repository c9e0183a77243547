#include "infosense/toydemo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "infosense/recon.hpp"

namespace infosense {

namespace {

void require_unit(const Eigen::Vector2d& w) {
  if (!w.allFinite() || std::abs(w.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("projection direction must be unit norm");
  }
}

double wrap_angle(double theta) {
  double t = std::fmod(theta, std::numbers::pi);
  if (t < 0.0) t += std::numbers::pi;
  return t;
}

double simpson_entropy(const std::vector<double>& means, const std::vector<double>& stds,
                       const std::vector<double>& weights, double lo, double hi, std::size_t intervals) {
  const double h = (hi - lo) / static_cast<double>(intervals);
  std::vector<double> log_norm(means.size());
  for (std::size_t c = 0; c < means.size(); ++c) {
    log_norm[c] = std::log(weights[c]) - std::log(stds[c] * std::sqrt(2.0 * std::numbers::pi));
  }
  auto integrand = [&](double x) {
    double p = 0.0;
    for (std::size_t c = 0; c < means.size(); ++c) {
      const double z = (x - means[c]) / stds[c];
      p += std::exp(log_norm[c] - 0.5 * z * z);
    }
    return p > 0.0 ? -p * std::log(p) : 0.0;
  };
  double sum = integrand(lo) + integrand(hi);
  for (std::size_t i = 1; i < intervals; ++i) {
    sum += (i % 2 ? 4.0 : 2.0) * integrand(lo + h * static_cast<double>(i));
  }
  return sum * h / 3.0;
}

}  // namespace

Gmm2D default_mixture() {
  Eigen::Matrix2d tilted, upright;
  tilted << 0.5, 0.3, 0.3, 0.35;
  upright << 0.1, 0.0, 0.0, 0.6;
  return Gmm2D({{0.25, {-2.0, 1.2}, tilted},
                {0.25, {2.0, -1.2}, tilted},
                {0.25, {-0.6, -1.0}, upright},
                {0.25, {0.6, 1.0}, upright}});
}

double projection_entropy(const Gmm2D& mixture, const Eigen::Vector2d& w) {
  require_unit(w);
  std::vector<double> means, stds, weights;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& c : mixture.components()) {
    const double m = w.dot(c.mean);
    const double s = std::sqrt(w.dot(c.covariance * w));
    means.push_back(m);
    stds.push_back(s);
    weights.push_back(c.weight);
    lo = std::min(lo, m - 10.0 * s);
    hi = std::max(hi, m + 10.0 * s);
  }
  std::size_t intervals = 1024;
  double previous = simpson_entropy(means, stds, weights, lo, hi, intervals);
  while (intervals < (std::size_t{1} << 22)) {
    intervals *= 2;
    const double current = simpson_entropy(means, stds, weights, lo, hi, intervals);
    if (std::abs(current - previous) < 1e-9) return current;
    previous = current;
  }
  throw std::runtime_error("projection_entropy: quadrature did not converge");
}

InfomaxResult infomax_projection(const Gmm2D& mixture, std::size_t n_angles) {
  if (n_angles < 16) throw std::invalid_argument("infomax_projection: n_angles must be >= 16");
  const double step = std::numbers::pi / static_cast<double>(n_angles);
  InfomaxResult best;
  best.entropy = -std::numeric_limits<double>::infinity();
  auto consider = [&](double theta) {
    const double h = projection_entropy(mixture, direction(theta));
    if (h > best.entropy + 1e-12) {
      best.entropy = h;
      best.theta = theta;
    }
  };
  for (std::size_t i = 0; i < n_angles; ++i) consider(step * static_cast<double>(i));
  const double centre = best.theta;
  for (std::size_t i = 0; i <= n_angles; ++i) {
    consider(centre - step + 2.0 * step * static_cast<double>(i) / static_cast<double>(n_angles));
  }
  best.theta = wrap_angle(best.theta);
  best.w = direction(best.theta);
  return best;
}

Eigen::Vector2d pca_direction(const Gmm2D& mixture) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(mixture.covariance());
  Eigen::Vector2d v = eig.eigenvectors().col(1);
  if (v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0)) v = -v;
  return v.normalized();
}

SchemeScore evaluate_scheme(const Gmm2D& mixture, const Eigen::Vector2d& w, std::size_t n_samples,
                            std::uint64_t seed) {
  if (n_samples < 1000) throw std::invalid_argument("evaluate_scheme: need at least 1000 samples");
  require_unit(w);
  const auto x = mixture.sample(n_samples, seed);
  double sq = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Eigen::Vector2d xi = x.row(i).transpose();
    sq += (xi - bls_estimate(mixture, w, w.dot(xi))).squaredNorm();
  }
  return {projection_entropy(mixture, w), sq / static_cast<double>(n_samples)};
}

std::vector<SweepRow> angle_sweep(const Gmm2D& mixture, std::size_t n_angles, std::size_t n_samples,
                                  std::uint64_t seed) {
  if (n_angles == 0) throw std::invalid_argument("angle_sweep: n_angles must be >= 1");
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < n_angles; ++i) {
    const double theta = std::numbers::pi * static_cast<double>(i) / static_cast<double>(n_angles);
    const SchemeScore s = evaluate_scheme(mixture, direction(theta), n_samples, seed);
    rows.push_back({theta, s.entropy, s.mse});
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows, std::string_view provenance) {
  out << "# " << provenance << '\n' << "theta,entropy_nats,mse\n";
  out.precision(12);
  for (const auto& r : rows) out << r.theta << ',' << r.entropy << ',' << r.mse << '\n';
}

ToySummary toy_summary(const Gmm2D& mixture, std::size_t n_samples, std::size_t random_directions,
                       std::uint64_t seed) {
  if (random_directions == 0) throw std::invalid_argument("toy_summary: need random directions");
  ToySummary out;
  const InfomaxResult im = infomax_projection(mixture);
  out.infomax_theta = im.theta;
  out.infomax = evaluate_scheme(mixture, im.w, n_samples, seed);
  const Eigen::Vector2d pc = pca_direction(mixture);
  out.pca_theta = wrap_angle(std::atan2(pc[1], pc[0]));
  out.pca = evaluate_scheme(mixture, pc, n_samples, seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  for (std::size_t i = 0; i < random_directions; ++i) {
    const SchemeScore s = evaluate_scheme(mixture, direction(angle(rng)), n_samples, seed);
    out.random.entropy += s.entropy;
    out.random.mse += s.mse;
  }
  out.random.entropy /= static_cast<double>(random_directions);
  out.random.mse /= static_cast<double>(random_directions);
  return out;
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("spearman: need two equal-length series");
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) throw std::invalid_argument("spearman: constant series");
  return sab / std::sqrt(saa * sbb);
}

}  // namespace infosense
