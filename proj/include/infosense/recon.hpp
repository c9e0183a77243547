#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "infosense/gmm.hpp"
#include "infosense/image.hpp"
#include "infosense/operators.hpp"

namespace infosense {

/// Zero-filled inverse W^T y, reshaped to the operator's square image.
Image linear_recon(const LinearOperator& op, const Eigen::VectorXd& y);

/// Upper bound of the squared norm of the forward-difference gradient.
inline constexpr double kGradientNormSq = 8.0;

struct TVSolverConfig {
  std::size_t max_iter = 2000;
  /// Primal and dual steps; tau * sigma * 8 must not exceed 1.
  double tau = 0.35;
  double sigma = 0.35;
  /// Radius of the fidelity ball ||W x - y|| <= epsilon. Values below
  /// 1e-6 ||y|| are raised to it.
  double data_epsilon = 0.0;
  /// Relative primal and dual residual that ends the iteration.
  double tol = 1e-6;

  void validate() const;
};

/// max(1e-6 ||y||, sigma sqrt(p)).
double fidelity_radius(const Eigen::VectorXd& y, double noise_sigma);

struct ReconResult {
  Image image;
  std::size_t iterations = 0;
  double residual = 0.0;  // ||W x - y||
  double tv = 0.0;
  bool converged = false;
  /// TV of the best iterate so far, one entry per iteration.
  std::vector<double> tv_history;
};

/// Isotropic total variation with forward differences and replicated
/// borders: sum over pixels of sqrt(dx^2 + dy^2).
double total_variation(const Image& image);

/// min TV(x) subject to ||W x - y|| <= epsilon for row-orthonormal W, by a
/// primal-dual iteration on the gradient with exact projection onto the
/// fidelity ball. Every iterate is feasible; the one with the lowest TV is
/// returned.
ReconResult tv_min_recon(const LinearOperator& op, const Eigen::VectorXd& y,
                         const TVSolverConfig& config = {});

struct PsnrResult {
  double db = 0.0;
  bool exact_match = false;
};

inline constexpr double kPsnrCap = 99.0;

/// 10 log10(peak^2 / MSE), capped at 99 dB. Identical images, and any pair
/// that reaches the cap (MSE <= peak^2 1e-9.9), set the flag.
PsnrResult psnr(const Image& reference, const Image& candidate, double peak = 255.0);

/// E[x | w^T x = y] under the mixture.
Eigen::Vector2d bls_estimate(const Gmm2D& mixture, const Eigen::Vector2d& w, double y);

}  // namespace infosense
