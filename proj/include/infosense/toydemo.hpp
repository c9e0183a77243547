#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "infosense/gmm.hpp"

namespace infosense {

/// Four equal-weight anisotropic components placed so that the principal
/// axis and the entropy-maximizing direction differ.
Gmm2D default_mixture();

/// Differential entropy (nats) of w^T x, a 1D Gaussian mixture, by Simpson
/// quadrature of -p ln p over +-10 standard deviations of every component.
/// The grid is doubled until successive values agree to 1e-9.
double projection_entropy(const Gmm2D& mixture, const Eigen::Vector2d& w);

inline Eigen::Vector2d direction(double theta) { return {std::cos(theta), std::sin(theta)}; }

struct InfomaxResult {
  double theta = 0.0;  // in [0, pi)
  Eigen::Vector2d w = Eigen::Vector2d::UnitX();
  double entropy = 0.0;
};

/// Grid search over theta = i pi / n_angles, then one finer grid of
/// n_angles points around the winner. A candidate replaces the incumbent only
/// if it is larger by more than 1e-12, so exact ties keep the lowest theta.
InfomaxResult infomax_projection(const Gmm2D& mixture, std::size_t n_angles = 180);

/// Leading eigenvector of the mixture covariance, sign chosen with a
/// non-negative first nonzero entry.
Eigen::Vector2d pca_direction(const Gmm2D& mixture);

struct SchemeScore {
  double entropy = 0.0;
  double mse = 0.0;
};

/// Projection entropy and the mean squared error of the BLS decoder over
/// n_samples draws (n_samples >= 1000).
SchemeScore evaluate_scheme(const Gmm2D& mixture, const Eigen::Vector2d& w, std::size_t n_samples,
                            std::uint64_t seed);

struct SweepRow {
  double theta = 0.0;
  double entropy = 0.0;
  double mse = 0.0;
};

/// evaluate_scheme at theta = i pi / n_angles, all on the same samples.
std::vector<SweepRow> angle_sweep(const Gmm2D& mixture, std::size_t n_angles, std::size_t n_samples,
                                  std::uint64_t seed);

/// `# <provenance>` then `theta,entropy_nats,mse`.
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows, std::string_view provenance);

struct ToySummary {
  SchemeScore infomax;
  SchemeScore pca;
  /// Averages over random directions.
  SchemeScore random;
  double infomax_theta = 0.0;
  double pca_theta = 0.0;
};

/// The three schemes on one sample set; `random_directions` uniform angles.
ToySummary toy_summary(const Gmm2D& mixture, std::size_t n_samples, std::size_t random_directions,
                       std::uint64_t seed);

/// Spearman rank correlation (average ranks for ties).
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace infosense
