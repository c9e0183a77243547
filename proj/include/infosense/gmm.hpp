#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace infosense {

struct GaussianComponent {
  double weight = 0.0;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Identity();
};

/// Mixture of 2D Gaussians; weights positive and summing to one, covariances
/// symmetric positive definite.
class Gmm2D {
 public:
  explicit Gmm2D(std::vector<GaussianComponent> components);

  const std::vector<GaussianComponent>& components() const { return components_; }

  Eigen::Vector2d mean() const;
  Eigen::Matrix2d covariance() const;

  /// Same mixture after x -> R x.
  Gmm2D rotated(const Eigen::Matrix2d& rotation) const;

  /// n draws, one per row.
  Eigen::Matrix<double, Eigen::Dynamic, 2> sample(std::size_t n, std::uint64_t seed) const;

  /// JSON object {"components": [{"weight", "mean": [x, y],
  /// "covariance": [[a, b], [b, c]]}, ...]}.
  static Gmm2D from_json(const std::string& text);
  static Gmm2D load(const std::filesystem::path& path);
  std::string to_json() const;

 private:
  std::vector<GaussianComponent> components_;
};

}  // namespace infosense
