#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "infosense/image.hpp"
#include "infosense/model.hpp"

namespace infosense {

/// Matrix-free linear map R^in_dim -> R^out_dim with its adjoint.
class LinearOperator {
 public:
  using Map = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  LinearOperator(std::size_t in_dim, std::size_t out_dim, Map apply, Map adjoint,
                 std::string name = {});

  std::size_t in_dim() const { return in_dim_; }
  std::size_t out_dim() const { return out_dim_; }
  const std::string& name() const { return name_; }

  /// Throws std::invalid_argument on a size mismatch.
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd adjoint(const Eigen::VectorXd& y) const;

 private:
  std::size_t in_dim_;
  std::size_t out_dim_;
  Map apply_;
  Map adjoint_;
  std::string name_;
};

/// outer after inner.
LinearOperator compose(const LinearOperator& outer, const LinearOperator& inner);

/// Operators with a common input stacked on top of each other.
LinearOperator vstack(const std::vector<LinearOperator>& blocks);

/// Picks x[indices[i]] into row i; the adjoint scatters back with zeros.
LinearOperator coordinate_selection(std::size_t n, std::vector<std::size_t> indices);

/// Orthonormal type-II 2D DCT of N x N images, C X C^T with the cosine
/// matrix cached.
class Dct2 {
 public:
  explicit Dct2(std::size_t n);

  std::size_t size() const { return n_; }
  Image forward(const Image& image) const;
  Image inverse(const Image& coefficients) const;

 private:
  std::size_t n_;
  Eigen::MatrixXd basis_;
};

Image dct2_forward(const Image& image);
Image dct2_inverse(const Image& coefficients);

/// Flattened image -> flattened DCT coefficients (orthogonal).
LinearOperator dct2_operator(std::size_t n);

/// Full-depth orthonormal 2D Haar transform, Mallat layout: after the last
/// level the approximation sits at (0, 0) and level-j details of size
/// s = n / 2^j occupy the blocks to the right of, below and diagonal to the
/// s x s corner.
Image haar2_forward(const Image& image);
Image haar2_inverse(const Image& coefficients);

struct HaarSubband {
  std::size_t level = 0;  // 1 is the finest
  char orientation = 'H';  // 'H', 'V' or 'D'
  std::vector<double> coefficients;
};

/// Detail subbands of a haar2_forward output, finest level first.
std::vector<HaarSubband> haar2_detail_subbands(const Image& coefficients);

/// All n^2 DCT indices (row, col) in JPEG zig-zag order from DC.
std::vector<std::pair<std::size_t, std::size_t>> zigzag_order(std::size_t n);

/// Flat indices r * n + c of the first `count` zig-zag positions.
std::vector<std::size_t> zigzag_indices(std::size_t n, std::size_t count);

/// In-place orthonormal fast Walsh-Hadamard transform; size must be a power
/// of two.
void fwht(std::span<double> values);

/// m rows of an n x n orthogonal binary (+-1/sqrt(size)) random mixing.
///
/// For dyadic n the rows are m distinct rows of H D with D random signs and H
/// the orthonormal Walsh-Hadamard matrix. Otherwise two rounds of
/// (random permutation, random signs, block-diagonal Hadamard with blocks
/// given by the binary digits of n) are applied before row selection, which
/// keeps W W^T = I without padding.
LinearOperator random_mixing_operator(std::size_t n, std::size_t m, std::uint64_t seed);

struct DctLinear {};
struct DctZigzag {};
struct RombergHybrid {
  std::size_t n_dct = 1000;
};
struct PureRandom {};
struct BandwiseRandom {
  ThresholdPlan plan;
};

struct SchemeSpec {
  std::variant<DctLinear, DctZigzag, RombergHybrid, PureRandom, BandwiseRandom> variant;
  std::uint64_t seed = 0;
};

std::string scheme_name(const SchemeSpec& spec);

/// Schemes decoded with the adjoint rather than TV minimization.
bool uses_linear_recon(const SchemeSpec& spec);

/// Bandwise spec from the model's capacity diagram at noise level sigma.
SchemeSpec bandwise_scheme(const MultiResModel& model, std::size_t p, double sigma,
                           std::uint64_t seed);

/// p x d row-orthonormal operator on flattened side x side images.
LinearOperator build_scheme(const SchemeSpec& spec, const MultiResModel& model, std::size_t p);

/// DCT rows at `direct` (flat coefficient indices) followed by `mixed_rows`
/// random mixing rows over the coefficients at `mixed`.
LinearOperator dct_domain_scheme(std::size_t n, std::vector<std::size_t> direct,
                                 std::vector<std::size_t> mixed, std::size_t mixed_rows,
                                 std::uint64_t seed, std::string name = {});

struct MeasurementSet {
  Eigen::VectorXd y;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::string scheme;
};

/// y = W x + N(0, sigma^2 I).
MeasurementSet measure(const LinearOperator& op, const Image& image, double sigma,
                       std::uint64_t seed);

/// Text form of a scheme run: one `key=value` per line with keys scheme, p,
/// n_dct, seed and sigma. Blank lines and '#' comments are ignored.
struct SchemeConfig {
  std::string scheme = "bandwise";
  std::size_t p = 0;
  std::size_t n_dct = 1000;
  std::uint64_t seed = 0;
  double sigma = 0.0;

  std::string to_text() const;
  static SchemeConfig parse(const std::string& text);
};

/// Spec for a config; bandwise schemes are planned from `model`.
SchemeSpec make_scheme_spec(const SchemeConfig& config, const MultiResModel& model);

}  // namespace infosense
