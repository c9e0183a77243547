#include "infosense/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string>

#include "infosense/ggdist.hpp"
#include "infosense/image.hpp"

namespace infosense {

MultiResModel::MultiResModel(std::vector<BandSpec> bands, double alpha, std::size_t side)
    : bands_(std::move(bands)), alpha_(alpha), side_(side) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("model: alpha must be > 0");
  if (bands_.empty()) throw std::invalid_argument("model: at least one band required");
  for (std::size_t l = 0; l < bands_.size(); ++l) {
    const BandSpec& b = bands_[l];
    if (b.level != l) throw std::invalid_argument("model: band levels must be 0..L in order");
    if (b.size == 0) throw std::invalid_argument("model: empty band " + std::to_string(l));
    if (!(b.variance > 0.0) || !std::isfinite(b.variance)) {
      throw std::invalid_argument("model: band variance must be finite and > 0");
    }
    if (l > 0 && b.variance > bands_[l - 1].variance) {
      throw std::invalid_argument("model: band variances must be non-increasing");
    }
    total_dim_ += b.size;
  }
  if (side_ != 0 && side_ * side_ != total_dim_) {
    throw std::invalid_argument("model: band sizes do not cover a side x side image");
  }
}

MultiResModel MultiResModel::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw std::invalid_argument("model: scale must be > 0");
  auto bands = bands_;
  for (auto& b : bands) b.variance *= factor;
  return {std::move(bands), alpha_, side_};
}

MultiResModel MultiResModel::with_variances(std::span<const double> variances) const {
  if (variances.size() != bands_.size()) throw std::invalid_argument("model: one variance per band");
  auto bands = bands_;
  for (std::size_t l = 0; l < bands.size(); ++l) bands[l].variance = variances[l];
  return {std::move(bands), alpha_, side_};
}

std::vector<std::size_t> dct_band_map(std::size_t n) {
  const std::size_t levels = dyadic_log2(n);
  std::vector<std::size_t> map(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t radius_sq = r * r + c * c;
      std::size_t band = 0;
      // smallest l with radius < 2^l, i.e. radius^2 < 4^l
      while (band < levels && radius_sq >= (std::size_t{1} << (2 * band))) ++band;
      map[r * n + c] = band;
    }
  }
  return map;
}

MultiResModel natural_image_model(std::size_t width, std::size_t height, double alpha) {
  if (width != height) throw std::invalid_argument("natural_image_model: image must be square");
  const std::size_t levels = dyadic_log2(width);
  if (levels < 3) throw std::invalid_argument("natural_image_model: side must be >= 8");
  std::vector<BandSpec> bands(levels + 1);
  for (std::size_t l = 0; l <= levels; ++l) {
    bands[l].level = l;
    bands[l].variance = std::ldexp(1.0, -2 * static_cast<int>(l));
  }
  for (std::size_t band : dct_band_map(width)) ++bands[band].size;
  return {std::move(bands), alpha, width};
}

NoisyMultiResModel noisy_model(const MultiResModel& model, double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("noisy_model: sigma must be >= 0");
  NoisyMultiResModel out;
  out.alpha = model.alpha();
  out.sigma = sigma;
  out.total_dim = model.total_dim();
  const double noise_var = sigma * sigma;
  const double clean_shape = shape_term(model.alpha());
  for (const BandSpec& b : model.bands()) {
    NoisyBand nb;
    nb.level = b.level;
    nb.size = b.size;
    nb.variance = b.variance + noise_var;
    nb.shape_term = sigma == 0.0 ? clean_shape : noisy_shape_term(model.alpha(), b.variance / noise_var);
    out.bands.push_back(nb);
  }
  return out;
}

bool selected_before(const CapacityEntry& a, const CapacityEntry& b) {
  if (a.nu != b.nu) return a.nu > b.nu;
  if (a.band != b.band) return a.band < b.band;
  return a.k < b.k;
}

std::vector<CapacityEntry> CapacityDiagram::sorted() const {
  auto out = entries;
  std::sort(out.begin(), out.end(), selected_before);
  return out;
}

CapacityDiagram capacity_diagram(const MultiResModel& model, double sigma) {
  const NoisyMultiResModel noisy = noisy_model(model, sigma);
  const double c2 = gaussian_shape_term();
  CapacityDiagram diagram;
  diagram.sigma = sigma;
  diagram.entries.reserve(noisy.total_dim);
  for (const NoisyBand& b : noisy.bands) {
    diagram.band_sizes.push_back(b.size);
    const double log_var = 0.5 * std::log(b.variance);
    if (b.size == 1) {
      diagram.entries.push_back({b.level, 1, b.shape_term + log_var});
      continue;
    }
    const double slope = 2.0 * (c2 - b.shape_term) / static_cast<double>(b.size - 1);
    for (std::size_t k = 1; k <= b.size; ++k) {
      diagram.entries.push_back({b.level, k, c2 + log_var - slope * static_cast<double>(k - 1)});
    }
  }
  return diagram;
}

std::size_t Allocation::total() const {
  std::size_t sum = 0;
  for (std::size_t v : per_band) sum += v;
  return sum;
}

Allocation allocate(const CapacityDiagram& diagram, std::size_t p) {
  const std::size_t bands = diagram.band_sizes.size();
  std::size_t d = 0;
  std::vector<std::size_t> offsets(bands);
  for (std::size_t l = 0; l < bands; ++l) {
    offsets[l] = d;
    d += diagram.band_sizes[l];
  }
  if (d != diagram.entries.size()) throw std::invalid_argument("allocate: diagram is inconsistent");
  if (p < 1 || p > d) throw std::invalid_argument("allocate: p must be in [1, d]");

  // k-way merge over the per-band ramps, which are already in selection order.
  Allocation allocation{std::vector<std::size_t>(bands, 0)};
  auto head = [&](std::size_t l) { return diagram.entries[offsets[l] + allocation.per_band[l]]; };
  auto later = [&](std::size_t a, std::size_t b) { return selected_before(head(b), head(a)); };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(later)> queue(later);
  for (std::size_t l = 0; l < bands; ++l) queue.push(l);
  for (std::size_t taken = 0; taken < p; ++taken) {
    const std::size_t l = queue.top();
    queue.pop();
    ++allocation.per_band[l];
    if (allocation.per_band[l] < diagram.band_sizes[l]) queue.push(l);
  }
  return allocation;
}

std::size_t ThresholdPlan::full_size(const MultiResModel& model) const {
  std::size_t n = 0;
  for (std::size_t l : full_bands) n += model.bands().at(l).size;
  return n;
}

std::size_t ThresholdPlan::partial_size(const MultiResModel& model) const {
  std::size_t n = 0;
  for (std::size_t l : partial_bands) n += model.bands().at(l).size;
  return n;
}

ThresholdPlan apply_threshold_rule(const Allocation& allocation, const MultiResModel& model) {
  const auto& bands = model.bands();
  if (allocation.per_band.size() != bands.size()) {
    throw std::invalid_argument("apply_threshold_rule: allocation has wrong band count");
  }
  enum class Role { kFull, kPartial, kSkipped };
  std::vector<Role> role(bands.size());
  for (std::size_t l = 0; l < bands.size(); ++l) {
    const double count = static_cast<double>(allocation.per_band[l]);
    const double size = static_cast<double>(bands[l].size);
    if (allocation.per_band[l] > bands[l].size) {
      throw std::invalid_argument("apply_threshold_rule: p_l exceeds band size");
    }
    if (count > kFullBandFraction * size) role[l] = Role::kFull;
    else if (count < kSkipBandFraction * size) role[l] = Role::kSkipped;
    else role[l] = Role::kPartial;
  }
  const std::size_t p = allocation.total();
  if (p == 0) throw std::invalid_argument("apply_threshold_rule: empty allocation");

  auto sum_of = [&](Role r) {
    std::size_t n = 0;
    for (std::size_t l = 0; l < bands.size(); ++l)
      if (role[l] == r) n += bands[l].size;
    return n;
  };
  while (sum_of(Role::kFull) > p) {
    for (std::size_t l = bands.size(); l-- > 0;) {
      if (role[l] == Role::kFull) {
        role[l] = Role::kPartial;
        break;
      }
    }
  }
  std::size_t residual = p - sum_of(Role::kFull);
  while (residual > sum_of(Role::kPartial)) {
    auto it = std::find(role.begin(), role.end(), Role::kSkipped);
    if (it == role.end()) throw std::logic_error("apply_threshold_rule: cannot place residual");
    *it = Role::kPartial;
  }
  if (residual == 0) {
    for (auto& r : role)
      if (r == Role::kPartial) r = Role::kSkipped;
  }

  ThresholdPlan plan;
  for (std::size_t l = 0; l < bands.size(); ++l) {
    switch (role[l]) {
      case Role::kFull: plan.full_bands.push_back(l); break;
      case Role::kPartial: plan.partial_bands.push_back(l); break;
      case Role::kSkipped: plan.skipped_bands.push_back(l); break;
    }
  }
  plan.residual_random_count = residual;
  return plan;
}

void write_capacity_csv(std::ostream& out, const CapacityDiagram& diagram,
                        std::string_view provenance) {
  out << "# " << provenance << '\n' << "global_index,band,k,nu_nats\n";
  out.precision(12);
  std::size_t index = 1;
  for (const CapacityEntry& e : diagram.sorted()) {
    out << index++ << ',' << e.band << ',' << e.k << ',' << e.nu << '\n';
  }
}

std::vector<double> empirical_band_variances(std::span<const double> dct_coefficients,
                                             std::size_t n) {
  if (dct_coefficients.size() != n * n) {
    throw std::invalid_argument("empirical_band_variances: expected n*n coefficients");
  }
  const auto map = dct_band_map(n);
  const std::size_t bands = dyadic_log2(n) + 1;
  std::vector<double> sums(bands, 0.0);
  std::vector<std::size_t> counts(bands, 0);
  for (std::size_t i = 0; i < map.size(); ++i) {
    sums[map[i]] += dct_coefficients[i] * dct_coefficients[i];
    ++counts[map[i]];
  }
  for (std::size_t l = 0; l < bands; ++l) sums[l] /= static_cast<double>(counts[l]);
  return sums;
}

MultiResModel calibrate_model(const MultiResModel& model, std::span<const double> dct_coefficients,
                              CalibrationMode mode) {
  if (model.side() == 0) throw std::invalid_argument("calibrate_model: model has no image side");
  auto raw = empirical_band_variances(dct_coefficients, model.side());
  if (raw.size() != model.band_count()) throw std::invalid_argument("calibrate_model: band mismatch");

  std::vector<double> lambdas(raw.size());
  if (mode == CalibrationMode::kRaw) {
    double ceiling = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < raw.size(); ++l) {
      ceiling = std::min(ceiling, raw[l]);
      lambdas[l] = ceiling;
    }
  } else {
    double log_amp = 0.0;
    std::size_t used = 0;
    for (std::size_t l = 1; l < raw.size(); ++l) {
      if (raw[l] <= 0.0) continue;
      log_amp += std::log(raw[l]) + static_cast<double>(l) * std::log(4.0);
      ++used;
    }
    if (used == 0) throw std::invalid_argument("calibrate_model: image has no AC energy");
    const double amp = std::exp(log_amp / static_cast<double>(used));
    lambdas[0] = std::max(raw[0], amp);
    for (std::size_t l = 1; l < raw.size(); ++l) lambdas[l] = std::ldexp(amp, -2 * static_cast<int>(l));
  }
  if (!(lambdas.back() > 0.0)) throw std::invalid_argument("calibrate_model: band with zero energy");
  return model.with_variances(lambdas);
}

MultiResModel calibrate_to_pixel_variance(const MultiResModel& model, double pixel_variance) {
  if (!(pixel_variance > 0.0)) throw std::invalid_argument("calibrate: pixel variance must be > 0");
  double ac = 0.0;
  for (const BandSpec& b : model.bands())
    if (b.level > 0) ac += b.variance * static_cast<double>(b.size);
  if (!(ac > 0.0)) throw std::invalid_argument("calibrate: model has no AC bands");
  return model.scaled(pixel_variance * static_cast<double>(model.total_dim()) / ac);
}

}  // namespace infosense
