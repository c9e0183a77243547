// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "infosense/entropy.hpp"
#include "infosense/ggdist.hpp"
#include "infosense/model.hpp"
#include "infosense/operators.hpp"
#include "infosense/recon.hpp"
#include "infosense/synthesis.hpp"
#include "infosense/toydemo.hpp"
#include "operator_checks.hpp"
#include "tv_oracle.hpp"

using namespace infosense;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Check = std::function<void(Outcome&)>;

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;
  Check run;
};

const double c2 = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);

// ---------------------------------------------------------------------------

void shape_term_closed_form(Outcome& o) {
  o.require(std::abs(shape_term(2.0) - c2) < 1e-10, "shape_term(2)");
  o.require(std::abs(shape_term(1.0) - (1.0 + 0.5 * std::log(2.0))) < 1e-10, "shape_term(1)");
  boost::math::quadrature::exp_sinh<double> rule;
  double worst = 0.0;
  for (double alpha : {0.3, 0.5, 1.0, 2.0, 4.0}) {
    const GGParams g(alpha, 0.0, 1.0);
    auto integrand = [&](double t) {
      const double p = gg_pdf(t, g);
      return p > 0.0 ? -p * std::log(p) : 0.0;
    };
    const double h = 2.0 * rule.integrate(integrand);
    worst = std::max(worst, std::abs(h - shape_term(alpha)));
  }
  o.detail << "max |closed form - quadrature| = " << worst << " nats";
  o.require(worst < 1e-4, "quadrature agreement");
}

void capacity_conservation(Outcome& o) {
  double worst = 0.0;
  for (double alpha : {0.3, 0.5, 1.0, 2.0}) {
    for (std::size_t d : {10u, 1000u, 65536u}) {
      double sum = 0.0;
      for (std::size_t k = 1; k <= d; ++k) sum += individual_capacity(alpha, d, k);
      const double target = static_cast<double>(d) * shape_term(alpha);
      worst = std::max(worst, std::abs(sum - target) / std::abs(target));
    }
  }
  o.detail << "max relative error " << worst;
  o.require(worst < 1e-9, "relative error");
}

void subvolume_dp(Outcome& o) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 5.0);
  double worst = 0.0;
  for (std::size_t d = 1; d <= 12; ++d) {
    std::vector<double> l(d);
    for (auto& v : l) v = u(rng);
    for (std::size_t p = 1; p <= d; ++p) {
      double sum = 0.0, count = 0.0;
      for (unsigned mask = 0; mask < (1u << d); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != p) continue;
        double prod = 1.0;
        for (std::size_t i = 0; i < d; ++i)
          if (mask & (1u << i)) prod *= l[i];
        sum += prod;
        count += 1.0;
      }
      const double dp = std::exp(log_subvolume_expectation(l, p));
      worst = std::max(worst, std::abs(dp / (sum / count) - 1.0));
    }
  }
  o.require(worst < 1e-10, "brute-force agreement");

  const auto lambdas = SpectrumProfile::power_law(2.0, 65536).variances();
  const auto t0 = std::chrono::steady_clock::now();
  const double big = log_subvolume_expectation(lambdas, 2048);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.detail << "max relative error vs enumeration " << worst << "; log E[vol] at d=2^16, p=2048 = " << big
           << " (" << secs << " s)";
  o.require(std::isfinite(big), "finite log volume");
  o.require(secs < 5.0, "large case under 5 s");
}

void gap_directions(Outcome& o) {
  const std::size_t d = 65536;
  double min_white = INFINITY;
  for (double alpha : {0.3, 0.5, 1.0}) {
    for (std::size_t p = 1; p <= 4096; ++p) {
      min_white = std::min(min_white, random_entropy_white(alpha, d, p) - pca_entropy_white(alpha, p));
    }
  }
  o.require(min_white > 0.0, "white gap > 0");

  double max_gauss = -INFINITY;
  for (double gamma : {1.0, 2.0, 3.0}) {
    const auto curve = random_entropy_gaussian_powerlaw_curve(gamma, d, 4096);
    for (std::size_t p = 2; p <= 4096; ++p) {
      max_gauss = std::max(max_gauss, curve[p - 1] - pca_entropy_gaussian_powerlaw(gamma, p));
    }
  }
  o.require(max_gauss < 0.0, "Gaussian gap < 0");

  // the hybrid checks span p = 1..d-1; at p = d every gap is identically zero
  const auto g2 = hybrid_gap_curve(0.5, 2.0, d, d - 1);
  const double max_g2 = *std::max_element(g2.begin(), g2.end());
  o.require(max_g2 < 0.0, "hybrid (0.5, 2) gap < 0");

  const auto g1 = hybrid_gap_curve(0.5, 1.0, d, d - 1);
  std::size_t first_positive = 0;
  for (std::size_t p = 1; p <= g1.size(); ++p) {
    if (g1[p - 1] > 0.0) {
      first_positive = p;
      break;
    }
  }
  const bool changes = g1.front() < 0.0 && first_positive > 0;
  o.require(changes, "hybrid (0.5, 1) sign change");
  o.detail << "min white gap " << min_white << "; max Gaussian gap (p>=2) " << max_gauss
           << "; max hybrid(0.5,2) gap " << max_g2 << "; hybrid(0.5,1) gap " << g1.front()
           << " at p=1, first positive at p=" << first_positive;
}

void knn_validation(Outcome& o) {
  const std::size_t d = 64, n = 100000, seeds = 20;
  const double c1 = shape_term(1.0);
  std::vector<std::size_t> ps{2, 4, 8};
  std::vector<double> mean(ps.size(), 0.0), lo(ps.size(), INFINITY), hi(ps.size(), -INFINITY);
  for (std::size_t s = 0; s < seeds; ++s) {
    auto xs = gg_sample(GGParams(1.0, 0.0, 1.0), n * d, 100 + s);
    const Eigen::Map<const Eigen::MatrixXd> x(xs.data(), d, n);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const Eigen::MatrixXd y = random_orthonormal_rows(ps[i], d, 500 + 31 * s + i) * x;
      const double h = knn_entropy(std::span<const double>(y.data(), y.size()), ps[i]).entropy;
      mean[i] += h / seeds;
      lo[i] = std::min(lo[i], h);
      hi[i] = std::max(hi[i], h);
    }
  }
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double p = static_cast<double>(ps[i]);
    const double eq8 = random_entropy_white(1.0, d, ps[i]);
    o.detail << "p=" << ps[i] << ": mean " << mean[i] << " [" << lo[i] << ", " << hi[i] << "] vs " << eq8
             << ", bounds (" << p * c1 << ", " << p * c2 << "); ";
    o.require(std::abs(mean[i] - eq8) / p < 0.15, "within 0.15 nats/projection at p=" + std::to_string(ps[i]));
    o.require(mean[i] > p * c1 && mean[i] < p * c2, "strictly inside bounds at p=" + std::to_string(ps[i]));
  }
}

void noisy_shape(Outcome& o) {
  const std::vector<double> inv_snr{1e-6, 1e-4, 1e-2, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0};
  for (double alpha : {0.5, 1.0}) {
    double prev = -INFINITY;
    bool monotone = true;
    for (double r : inv_snr) {
      const double v = noisy_shape_term(alpha, 1.0 / r);
      monotone = monotone && v > prev;
      prev = v;
    }
    const double low = noisy_shape_term(alpha, 1e-2);
    const double high = noisy_shape_term(alpha, 1e6);
    o.detail << "alpha=" << alpha << ": c'(1e-2) - c2 = " << low - c2 << ", c'(1e6) - c_alpha = "
             << high - shape_term(alpha) << "; ";
    o.require(monotone, "monotone in 1/snr");
    o.require(std::abs(low - c2) < 0.02, "low-snr limit");
    o.require(std::abs(high - shape_term(alpha)) < 0.01, "high-snr limit");
  }
}

void operator_invariants(Outcome& o) {
  double worst_rows = 0.0, worst_adj = 0.0;
  std::size_t count = 0;
  for (std::size_t n : {32u, 64u, 256u}) {
    const auto model = natural_image_model(n, n, 0.32);
    const std::size_t d = n * n;
    for (std::size_t p : {d / 10, d / 4}) {
      for (std::uint64_t seed : {1u, 2u, 3u}) {
        const std::vector<SchemeSpec> specs = {
            {DctZigzag{}, seed},
            {RombergHybrid{std::min<std::size_t>(p, (1000 * d + 32768) / 65536)}, seed},
            {PureRandom{}, seed},
            bandwise_scheme(model, p, 0.0, seed)};
        for (const auto& spec : specs) {
          const auto e = testing::operator_errors(build_scheme(spec, model, p), 20, seed * 7 + n);
          worst_rows = std::max(worst_rows, e.row_orthonormality);
          worst_adj = std::max(worst_adj, e.adjoint);
          ++count;
        }
      }
    }
  }
  o.require(worst_rows < 1e-10, "W W^T = I");
  o.require(worst_adj < 1e-10, "adjoint consistency");

  // N = 16: the bandwise operator in DCT coordinates is a coefficient
  // selection stacked on an orthonormal mixing confined to the partial bands
  const std::size_t n = 16;
  const auto model = natural_image_model(n, n, 0.32);
  const Eigen::MatrixXd dct = testing::dct2_matrix(n);
  const auto band_of = dct_band_map(n);
  double worst_dense = 0.0;
  for (std::size_t p : {20u, 64u, 150u}) {
    const auto spec = bandwise_scheme(model, p, 0.0, 5);
    const auto& plan = std::get<BandwiseRandom>(spec.variant).plan;
    auto in = [](const std::vector<std::size_t>& v, std::size_t l) { return std::find(v.begin(), v.end(), l) != v.end(); };
    const Eigen::MatrixXd rows = testing::dense_matrix(build_scheme(spec, model, p)) * dct.transpose();
    Eigen::MatrixXd expected_support = Eigen::MatrixXd::Zero(rows.rows(), rows.cols());
    std::size_t r = 0;
    for (std::size_t i = 0; i < n * n; ++i) {
      if (in(plan.full_bands, band_of[i])) expected_support(r++, i) = 1.0;
    }
    Eigen::MatrixXd off = rows;
    for (std::size_t i = 0; i < r; ++i) off.row(i) -= expected_support.row(i);
    for (std::size_t row = r; row < p; ++row)
      for (std::size_t i = 0; i < n * n; ++i)
        if (in(plan.partial_bands, band_of[i])) off(row, i) = 0.0;
    worst_dense = std::max(worst_dense, off.cwiseAbs().maxCoeff());
    worst_dense = std::max(worst_dense, (rows * rows.transpose() - Eigen::MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff());
    o.require(r + plan.residual_random_count == p, "row count");
  }
  o.require(worst_dense < 1e-10, "dense oracle at N=16");
  o.detail << count << " operators, max |WW^T y - y| " << worst_rows << ", max adjoint mismatch " << worst_adj
           << ", dense-oracle deviation " << worst_dense;
}

Image nested_rectangle_phantom() {
  Image x = Image::Constant(32, 32, 20.0);
  x.block(6, 8, 20, 18).setConstant(120.0);
  x.block(12, 13, 8, 6).setConstant(220.0);
  return x;
}

void tv_recovery(Outcome& o) {
  const Image x = nested_rectangle_phantom();
  const auto op = random_mixing_operator(32 * 32, 32 * 32 / 2, 7);
  const auto r = tv_min_recon(op, op.apply(flatten(x)));
  const double rel = (r.image - x).norm() / x.norm();
  o.require(rel < 1e-3, "phantom relative error");
  o.require(r.iterations <= 2000, "iteration budget");

  double worst = 0.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const std::size_t n = 8;
    const auto small = random_mixing_operator(n * n, n * n / 2, seed);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    Image img = Image::Zero(n, n);
    img.block(2, 1, 4, 5).setConstant(u(rng));
    img(6, 6) = u(rng);
    const Eigen::VectorXd y = small.apply(flatten(img));
    TVSolverConfig cfg;
    cfg.max_iter = 20000;
    cfg.tol = 1e-9;
    const double tv = tv_min_recon(small, y, cfg).tv;
    const double oracle = testing::subgradient_tv_oracle(small, y, n, 100000);
    worst = std::max(worst, std::abs(tv - oracle) / oracle);
  }
  o.require(worst < 0.005, "8x8 TV agreement");
  o.detail << "phantom relative error " << rel << " after " << r.iterations << " iterations; 8x8 TV vs oracle "
           << 100.0 * worst << " %";
}

std::vector<std::size_t> cumulative(const Allocation& a) {
  std::vector<std::size_t> c(a.per_band.size());
  std::size_t run = 0;
  for (std::size_t l = 0; l < c.size(); ++l) c[l] = run += a.per_band[l];
  return c;
}

// Every prefix of bands holds at least as many sensors, strictly more for some prefix.
bool favours_low_bands(const Allocation& a, const Allocation& b) {
  const auto ca = cumulative(a), cb = cumulative(b);
  bool strict = false;
  for (std::size_t l = 0; l < ca.size(); ++l) {
    if (ca[l] < cb[l]) return false;
    strict = strict || ca[l] > cb[l];
  }
  return strict;
}

std::string join(const Allocation& a) {
  std::string s;
  for (std::size_t v : a.per_band) s += (s.empty() ? "" : " ") + std::to_string(v);
  return s;
}

void allocation_behavior(Outcome& o) {
  const auto m32 = natural_image_model(256, 256, 0.32);
  const auto diagram = capacity_diagram(m32, 0.0);
  auto sorted = diagram.entries;
  std::sort(sorted.begin(), sorted.end(), selected_before);
  bool exact = true;
  for (std::size_t p : {1u, 100u, 5000u, 21000u, 40000u, 65536u}) {
    std::vector<std::size_t> oracle(m32.band_count(), 0);
    for (std::size_t i = 0; i < p; ++i) oracle[sorted[i].band]++;
    exact = exact && allocate(diagram, p).per_band == oracle;
  }
  o.require(exact, "top-p oracle");

  const auto a32 = allocate(diagram, 5000);
  const auto a49 = allocate(capacity_diagram(natural_image_model(256, 256, 0.49), 0.0), 5000);
  o.require(favours_low_bands(a49, a32), "alpha 0.49 favours low bands");

  const auto calibrated = calibrate_to_pixel_variance(m32, 50.0 * 50.0);
  const auto clean = allocate(capacity_diagram(calibrated, 0.0), 21000);
  const auto noisy = allocate(capacity_diagram(calibrated, 20.0), 21000);
  o.require(favours_low_bands(noisy, clean), "sigma 20 favours low bands");
  o.detail << "p=5000 alpha .32: " << join(a32) << " | alpha .49: " << join(a49) << "; p=21000 sigma 0: "
           << join(clean) << " | sigma 20: " << join(noisy);
}

void end_to_end(Outcome& o) {
  const std::size_t n = 64, d = n * n;
  const double alpha = 0.32;
  const auto base = natural_image_model(n, n, alpha);
  for (double frac : {0.10, 0.25}) {
    const auto p = static_cast<std::size_t>(std::lround(frac * d));
    double linear = 0, dct_tv = 0, random = 0, uca = 0, romberg = 0;
    for (std::uint64_t s = 0; s < 5; ++s) {
      const Image x = synthesize_multires_image(n, alpha, 1000 + s);
      const Image c = dct2_forward(x);
      const auto model = calibrate_model(base, std::span<const double>(c.data(), c.size()), CalibrationMode::kFitted);
      auto run = [&](const SchemeSpec& spec) {
        const auto op = build_scheme(spec, model, p);
        const Eigen::VectorXd y = measure(op, x, 0.0, s).y;
        const Image r = uses_linear_recon(spec) ? linear_recon(op, y) : tv_min_recon(op, y).image;
        return psnr(x, r).db / 5.0;
      };
      linear += run({DctLinear{}, s + 1});
      dct_tv += run({DctZigzag{}, s + 1});
      random += run({PureRandom{}, s + 1});
      uca += run(bandwise_scheme(model, p, 0.0, s + 1));
      romberg += run({RombergHybrid{std::min(p, (1000 * d + 32768) / 65536)}, s + 1});
    }
    o.detail << "p=" << p << ": linear " << linear << ", DCT-TV " << dct_tv << ", 1k-DCT+random " << romberg
             << ", random " << random << ", UCA " << uca << " dB; ";
    const std::string at = " at p=" + std::to_string(p);
    o.require(uca - random >= 0.2, "UCA - random >= 0.2 dB" + at);
    o.require(dct_tv - linear >= 0.2, "DCT-TV - linear >= 0.2 dB" + at);
  }
  o.detail << "no Cameraman/Einstein images supplied, natural-image table skipped";
}

void toy_demo(Outcome& o) {
  const Gmm2D mixture = default_mixture();
  const auto s = toy_summary(mixture, 10000, 1000, 1);
  o.require(s.infomax.entropy >= s.pca.entropy && s.pca.entropy >= s.random.entropy, "entropy ordering");
  o.require(s.infomax.mse < s.pca.mse && s.pca.mse < s.random.mse, "MSE ordering");
  const auto rows = angle_sweep(mixture, 64, 10000, 1);
  std::vector<double> h, mse;
  for (const auto& r : rows) {
    h.push_back(r.entropy);
    mse.push_back(r.mse);
  }
  const double rho = spearman(h, mse);
  o.require(rho < 0.0, "negative rank correlation");
  o.detail << "entropy/MSE InfoMax " << s.infomax.entropy << "/" << s.infomax.mse << ", PCA " << s.pca.entropy
           << "/" << s.pca.mse << ", random(1000 dirs) " << s.random.entropy << "/" << s.random.mse
           << "; Spearman over 64 angles " << rho;
}

void alpha_round_trip(Outcome& o) {
  for (double alpha : {0.32, 0.49, 1.0}) {
    const Image img = synthesize_multires_image(256, alpha, 77);
    std::size_t used = 0;
    for (const auto& b : haar2_detail_subbands(haar2_forward(img)))
      if (b.coefficients.size() >= kMinSubbandForAlpha) used += b.coefficients.size();
    const auto est = estimate_image_alpha(img);
    const double rel = std::abs(est.alpha - alpha) / alpha;
    o.detail << "alpha " << alpha << " -> " << est.alpha << " (n=" << used << "); ";
    o.require(used >= 10000, "enough coefficients");
    o.require(rel <= 0.10 && !est.clamped, "within 10% for alpha=" + std::to_string(alpha));
  }
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "shape-term closed form and quadrature", 1, shape_term_closed_form},
      {2, "capacity conservation", 1, capacity_conservation},
      {3, "subvolume DP exactness and range", 5, subvolume_dp},
      {4, "random-vs-PCA gap directions", 10, gap_directions},
      {5, "kNN validation of the random-projection entropy", 120, knn_validation},
      {6, "noisy shape term limits and monotonicity", 10, noisy_shape},
      {7, "operator invariants", 30, operator_invariants},
      {8, "TV solver recovery", 60, tv_recovery},
      {9, "allocation behavior", 10, allocation_behavior},
      {10, "end-to-end PSNR ordering", 600, end_to_end},
      {11, "toy demo ordering", 60, toy_demo},
      {12, "alpha estimation round trip", 30, alpha_round_trip},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= c.time_limit_s) {
      o.require(false, "runtime " + std::to_string(secs) + " s over " + std::to_string(c.time_limit_s) + " s");
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %2d: %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
