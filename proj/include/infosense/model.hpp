#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace infosense {

/// One resolution band: `size` iid components of variance `variance`.
struct BandSpec {
  std::size_t level = 0;
  std::size_t size = 0;
  double variance = 0.0;
};

/// Components grouped into octave bands 0..L, iid GG(alpha) within a band,
/// with variances non-increasing in the level.
class MultiResModel {
 public:
  /// `side` is the image side for DCT-backed models, 0 for abstract ones.
  MultiResModel(std::vector<BandSpec> bands, double alpha, std::size_t side = 0);

  const std::vector<BandSpec>& bands() const { return bands_; }
  double alpha() const { return alpha_; }
  std::size_t total_dim() const { return total_dim_; }
  std::size_t side() const { return side_; }
  std::size_t band_count() const { return bands_.size(); }

  /// Same bands with every variance multiplied by `factor`.
  MultiResModel scaled(double factor) const;

  /// Same bands with new variances (one per band, non-increasing).
  MultiResModel with_variances(std::span<const double> variances) const;

 private:
  std::vector<BandSpec> bands_;
  double alpha_;
  std::size_t total_dim_ = 0;
  std::size_t side_;
};

/// Band of each DCT coefficient of an n x n image, flat index r * n + c.
///
/// With radius = sqrt(r^2 + c^2): band 0 is the DC coefficient, band l holds
/// 2^(l-1) <= radius < 2^l, and the last band L = log2(n) also takes the
/// corner coefficients with radius >= n.
std::vector<std::size_t> dct_band_map(std::size_t n);

/// Dyadic radial DCT shells of an n x n image with lambda_l = 4^-l.
MultiResModel natural_image_model(std::size_t width, std::size_t height, double alpha);

/// Band after adding white Gaussian noise of standard deviation sigma.
struct NoisyBand {
  std::size_t level = 0;
  std::size_t size = 0;
  double variance = 0.0;    // lambda + sigma^2
  double shape_term = 0.0;  // c'_alpha at snr = lambda / sigma^2
};

struct NoisyMultiResModel {
  std::vector<NoisyBand> bands;
  double alpha = 0.0;
  double sigma = 0.0;
  std::size_t total_dim = 0;
};

/// Variances shifted by sigma^2 and shapes from noisy_shape_term; sigma = 0
/// keeps the variances and uses shape_term(alpha).
NoisyMultiResModel noisy_model(const MultiResModel& model, double sigma);

struct CapacityEntry {
  std::size_t band = 0;
  std::size_t k = 0;  // 1-based index within the band
  double nu = 0.0;
};

/// Individual capacities of bandwise random projections.
struct CapacityDiagram {
  /// Band-major, k ascending within each band; one entry per component.
  std::vector<CapacityEntry> entries;
  std::vector<std::size_t> band_sizes;
  double sigma = 0.0;

  /// Entries in selection order: nu descending, then lower band, then lower k.
  std::vector<CapacityEntry> sorted() const;
};

/// True if a should be selected before b.
bool selected_before(const CapacityEntry& a, const CapacityEntry& b);

CapacityDiagram capacity_diagram(const MultiResModel& model, double sigma);

/// Sensors per band.
struct Allocation {
  std::vector<std::size_t> per_band;

  std::size_t total() const;
};

/// The p entries of largest capacity; within a band these are k = 1..p_l.
Allocation allocate(const CapacityDiagram& diagram, std::size_t p);

/// Bands captured deterministically, bands mixed jointly at random, and bands
/// left out, plus the number of random rows over the mixed bands.
struct ThresholdPlan {
  std::vector<std::size_t> full_bands;
  std::vector<std::size_t> partial_bands;
  std::vector<std::size_t> skipped_bands;
  std::size_t residual_random_count = 0;

  std::size_t full_size(const MultiResModel& model) const;
  std::size_t partial_size(const MultiResModel& model) const;
};

inline constexpr double kFullBandFraction = 0.9;
inline constexpr double kSkipBandFraction = 0.1;

/// p_l > 0.9 |B_l| becomes a full band, p_l < 0.1 |B_l| is skipped, and the
/// remaining budget is spent as one random block over all other bands.
///
/// Two repairs keep the plan buildable with exactly p rows: if promoting
/// bands would exceed p, the highest promoted bands are demoted to partial;
/// if the residual exceeds the partial bands' size, the lowest skipped bands
/// join the random block.
ThresholdPlan apply_threshold_rule(const Allocation& allocation, const MultiResModel& model);

/// `# <provenance>` then `global_index,band,k,nu_nats` in selection order.
void write_capacity_csv(std::ostream& out, const CapacityDiagram& diagram,
                        std::string_view provenance);

/// Mean squared DCT coefficient over each band of an n x n coefficient array.
std::vector<double> empirical_band_variances(std::span<const double> dct_coefficients,
                                             std::size_t n);

enum class CalibrationMode {
  /// Empirical shell variances, made non-increasing by a running minimum.
  kRaw,
  /// Amplitude of the 4^-l law fitted in the log domain over bands >= 1; the
  /// DC band keeps max(empirical, fitted).
  kFitted,
};

/// Model variances taken from an image's DCT coefficients.
MultiResModel calibrate_model(const MultiResModel& model, std::span<const double> dct_coefficients,
                              CalibrationMode mode);

/// Scales a lambda_0 = 1 model so that its mean per-pixel AC variance,
/// sum over bands l >= 1 of lambda_l |B_l| / d, equals `pixel_variance`.
MultiResModel calibrate_to_pixel_variance(const MultiResModel& model, double pixel_variance);

}  // namespace infosense
