#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace infosense {

/// Ordered per-axis variances lambda_1 >= lambda_2 >= ... > 0.
class SpectrumProfile {
 public:
  explicit SpectrumProfile(std::vector<double> variances);

  /// lambda_k = 1 / k^gamma for k = 1..d.
  static SpectrumProfile power_law(double gamma, std::size_t d);

  const std::vector<double>& variances() const { return variances_; }
  std::size_t size() const { return variances_.size(); }

 private:
  std::vector<double> variances_;
};

struct KnnEntropyResult {
  double entropy = 0.0;
  /// True when coincident points forced a tiny deterministic jitter.
  bool perturbed = false;
};

/// Kozachenko-Leonenko differential entropy estimate (nats) from n points of
/// dimension `dim`, stored row-major in `points` (n * dim values). Neighbours
/// are exact, found with a kd-tree.
KnnEntropyResult knn_entropy(std::span<const double> points, std::size_t dim,
                             std::size_t k_neighbors = 3);

/// Expected entropy of p random orthonormal projections of a white
/// d-dimensional GG(alpha) source, pairwise-dependency approximation:
/// p c2 - p (p - 1) / (d - 1) (c2 - c_alpha).
double random_entropy_white(double alpha, std::size_t d, std::size_t p);

/// Entropy of the first p principal (= independent) components of the same
/// source: p c_alpha.
double pca_entropy_white(double alpha, std::size_t p);

/// nu(k) = c2 - 2 (k - 1) / (d - 1) (c2 - c_alpha), the entropy added by the
/// k-th random projection. Sums to d c_alpha over k = 1..d.
double individual_capacity(double alpha, std::size_t d, std::size_t k);

/// log of S_p(lambda) / C(d, p), the mean product over all p-subsets.
///
/// Evaluated with the recursion S_p(m) = S_p(m-1) + lambda_m S_{p-1}(m-1).
/// Each order p keeps its own running exponent, so products far below the
/// double range (1/k^2 spectra at d = 2^16) stay representable.
double log_subvolume_expectation(std::span<const double> lambdas, std::size_t p);

/// The same quantity for every p = 1..p_max at once (entry p-1), at the cost
/// of a single O(d p_max) sweep.
std::vector<double> log_subvolume_expectations(std::span<const double> lambdas,
                                               std::size_t p_max);

/// exp(log_subvolume_expectation); throws std::range_error when the value
/// is not representable as a double.
double subvolume_expectation(std::span<const double> lambdas, std::size_t p);

double random_entropy_gaussian_powerlaw(double gamma, std::size_t d, std::size_t p);

/// Entry p-1 is random_entropy_gaussian_powerlaw(gamma, d, p).
std::vector<double> random_entropy_gaussian_powerlaw_curve(double gamma, std::size_t d,
                                                           std::size_t p_max);

/// p c2 - (gamma / 2) sum_{k<=p} ln k.
double pca_entropy_gaussian_powerlaw(double gamma, std::size_t p);

/// Random-minus-PCA entropy gap for the sparse power-law source, taken as the
/// sum of the white gap and the Gaussian power-law gap.
double hybrid_gap(double alpha, double gamma, std::size_t d, std::size_t p);

/// Entry p-1 is hybrid_gap(alpha, gamma, d, p).
std::vector<double> hybrid_gap_curve(double alpha, double gamma, std::size_t d,
                                     std::size_t p_max);

struct EntropyCurve {
  std::string scheme;
  std::vector<std::size_t> p_values;
  std::vector<double> entropies;

  void validate() const;
};

/// Writes `# <provenance>` then `p,scheme,entropy_nats` rows for every curve.
void write_entropy_curves_csv(std::ostream& out, std::span<const EntropyCurve> curves,
                              std::string_view provenance);

/// p x d matrix with orthonormal rows, uniformly distributed on the Stiefel
/// manifold (QR of a Gaussian matrix with the sign of R's diagonal fixed).
Eigen::MatrixXd random_orthonormal_rows(std::size_t p, std::size_t d, std::uint64_t seed);

}  // namespace infosense
