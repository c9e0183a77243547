#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "infosense/entropy.hpp"
#include "infosense/ggdist.hpp"
#include "infosense/image.hpp"
#include "infosense/model.hpp"
#include "infosense/operators.hpp"
#include "infosense/recon.hpp"
#include "infosense/synthesis.hpp"
#include "infosense/toydemo.hpp"

namespace fs = std::filesystem;
using namespace infosense;

namespace {

struct Options {
  std::string image;
  double alpha = 0.32;
  double gamma = 1.0;
  std::size_t p = 0;
  std::vector<std::size_t> p_grid;
  std::vector<double> sigma{0.0};
  std::vector<std::string> schemes{"dct-linear", "dct-tv", "romberg", "random", "uca"};
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string mixture_file;

  // command-specific
  std::size_t size = 256;
  std::size_t dim = 65536;
  std::string source = "hybrid";
  std::size_t samples = 10000;
  std::size_t angles = 64;
  std::size_t random_directions = 1000;
  std::size_t max_iter = 2000;
  std::string calibration = "fitted";
  double pixel_std = 50.0;
};

fs::path out_path(const Options& o, const std::string& name) {
  fs::create_directories(o.out_dir);
  return fs::path(o.out_dir) / name;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

template <class T>
std::string list(const std::vector<T>& v) {
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? ";" : "") << v[i];
  return s.str();
}

// 1..max, dense at small p then roughly 24 points per decade.
std::vector<std::size_t> default_grid(std::size_t max) {
  std::vector<std::size_t> g;
  for (double v = 1.0; v <= static_cast<double>(max); v *= std::pow(10.0, 1.0 / 24.0)) {
    const auto p = static_cast<std::size_t>(std::llround(v));
    if (g.empty() || p > g.back()) g.push_back(p);
  }
  if (g.back() != max) g.push_back(max);
  return g;
}

std::size_t default_n_dct(std::size_t d, std::size_t p) {
  return std::min(p, static_cast<std::size_t>(std::llround(1000.0 * static_cast<double>(d) / 65536.0)));
}

Image load_or_synthesize(const Options& o, std::string& origin) {
  if (!o.image.empty()) {
    origin = o.image;
    return read_pgm(o.image);
  }
  origin = "synthetic(alpha=" + std::to_string(o.alpha) + ",size=" + std::to_string(o.size) + ",seed=" +
           std::to_string(o.seed) + ")";
  return synthesize_multires_image(o.size, o.alpha, o.seed);
}

CalibrationMode calibration_mode(const std::string& s) {
  if (s == "fitted") return CalibrationMode::kFitted;
  if (s == "raw") return CalibrationMode::kRaw;
  throw std::invalid_argument("unknown calibration '" + s + "' (raw or fitted)");
}

void cmd_capacity(const Options& o) {
  MultiResModel model = natural_image_model(o.size, o.size, o.alpha);
  std::string origin = "model";
  if (!o.image.empty()) {
    const Image img = read_pgm(o.image);
    if (img.rows() != img.cols()) throw std::invalid_argument("image must be square");
    model = natural_image_model(img.rows(), img.cols(), o.alpha);
    const Image c = dct2_forward(img);
    model = calibrate_model(model, std::span<const double>(c.data(), c.size()), calibration_mode(o.calibration));
    origin = o.image;
  } else {
    model = calibrate_to_pixel_variance(model, o.pixel_std * o.pixel_std);
  }
  std::ofstream alloc = open_out(out_path(o, "allocation.csv"));
  std::ostringstream prov;
  prov << "infosense capacity source=" << origin << " alpha=" << o.alpha << " side=" << model.side()
       << " pixel_std=" << o.pixel_std << " calibration=" << o.calibration << " p=" << o.p
       << " seed=" << o.seed;
  alloc << "# " << prov.str() << "\nsigma,band,band_size,variance,allocated,role\n";
  for (double sigma : o.sigma) {
    const CapacityDiagram diagram = capacity_diagram(model, sigma);
    std::ostringstream name;
    name << "capacity_sigma" << sigma << ".csv";
    std::ofstream out = open_out(out_path(o, name.str()));
    write_capacity_csv(out, diagram, prov.str() + " sigma=" + std::to_string(sigma));
    if (o.p == 0) continue;
    const Allocation a = allocate(diagram, o.p);
    const ThresholdPlan plan = apply_threshold_rule(a, model);
    auto role = [&](std::size_t l) {
      for (std::size_t f : plan.full_bands)
        if (f == l) return "full";
      for (std::size_t f : plan.partial_bands)
        if (f == l) return "random";
      return "skipped";
    };
    std::cout << "sigma=" << sigma << " allocation:";
    for (std::size_t l = 0; l < a.per_band.size(); ++l) {
      const BandSpec& b = model.bands()[l];
      alloc << sigma << ',' << l << ',' << b.size << ',' << b.variance << ',' << a.per_band[l] << ',' << role(l) << '\n';
      std::cout << ' ' << a.per_band[l];
    }
    std::cout << "  (random rows " << plan.residual_random_count << ")\n";
  }
}

void cmd_compare(const Options& o) {
  const std::vector<std::size_t> grid = o.p_grid.empty() ? default_grid(std::min<std::size_t>(o.dim, 4096)) : o.p_grid;
  std::size_t p_max = 0;
  for (std::size_t p : grid) {
    if (p < 1 || p > o.dim) throw std::invalid_argument("p-grid entries must be in [1, d]");
    p_max = std::max(p_max, p);
  }
  std::vector<double> gauss_random;
  if (o.source != "white") gauss_random = random_entropy_gaussian_powerlaw_curve(o.gamma, o.dim, p_max);

  EntropyCurve random{"random", grid, {}}, pca{"pca", grid, {}}, gap{"gap", grid, {}};
  for (std::size_t p : grid) {
    double r = 0.0, q = 0.0;
    if (o.source == "white") {
      r = random_entropy_white(o.alpha, o.dim, p);
      q = pca_entropy_white(o.alpha, p);
    } else if (o.source == "gaussian") {
      r = gauss_random[p - 1];
      q = pca_entropy_gaussian_powerlaw(o.gamma, p);
    } else if (o.source == "hybrid") {
      // sparse shape and power-law variances; the entropies add the two excesses over p c2
      const double c2 = gaussian_shape_term();
      r = gauss_random[p - 1] + random_entropy_white(o.alpha, o.dim, p) - static_cast<double>(p) * c2;
      q = pca_entropy_gaussian_powerlaw(o.gamma, p) + pca_entropy_white(o.alpha, p) - static_cast<double>(p) * c2;
    } else {
      throw std::invalid_argument("unknown source '" + o.source + "' (white, gaussian or hybrid)");
    }
    random.entropies.push_back(r);
    pca.entropies.push_back(q);
    gap.entropies.push_back(r - q);
  }
  std::ostringstream prov;
  prov << "infosense compare source=" << o.source << " alpha=" << o.alpha << " gamma=" << o.gamma << " d=" << o.dim
       << " seed=" << o.seed;
  std::ofstream out = open_out(out_path(o, "entropy_curves.csv"));
  write_entropy_curves_csv(out, std::vector<EntropyCurve>{random, pca, gap}, prov.str());
  std::size_t positive = 0;
  for (double g : gap.entropies) positive += g > 0.0;
  std::cout << "gap > 0 at " << positive << " of " << grid.size() << " grid points\n";
}

void cmd_sense(const Options& o) {
  std::string origin;
  const Image x = load_or_synthesize(o, origin);
  if (x.rows() != x.cols()) throw std::invalid_argument("image must be square");
  const auto n = static_cast<std::size_t>(x.rows());
  const std::size_t d = n * n;
  const Image c = dct2_forward(x);
  const MultiResModel model =
      calibrate_model(natural_image_model(n, n, o.alpha), std::span<const double>(c.data(), c.size()),
                      calibration_mode(o.calibration));
  const std::vector<std::size_t> grid = o.p_grid.empty()
                                            ? std::vector<std::size_t>{d / 10, d / 4}
                                            : o.p_grid;
  const double sigma = o.sigma.front();

  std::ostringstream prov;
  prov << "infosense sense image=" << origin << " alpha=" << o.alpha << " sigma=" << sigma << " seed=" << o.seed
       << " calibration=" << o.calibration << " schemes=" << list(o.schemes) << " p_grid=" << list(grid)
       << " max_iter=" << o.max_iter;
  std::ofstream out = open_out(out_path(o, "psnr.csv"));
  out << "# " << prov.str() << "\nscheme,p,psnr_db,exact_match,iterations,converged,residual\n";

  for (std::size_t p : grid) {
    for (const std::string& name : o.schemes) {
      SchemeConfig cfg;
      cfg.scheme = name;
      cfg.p = p;
      cfg.n_dct = default_n_dct(d, p);
      cfg.seed = o.seed;
      cfg.sigma = sigma;
      const SchemeSpec spec = make_scheme_spec(cfg, model);
      const LinearOperator op = build_scheme(spec, model, p);
      const MeasurementSet m = measure(op, x, sigma, o.seed);
      Image rec;
      std::size_t iterations = 0;
      bool converged = true;
      if (uses_linear_recon(spec)) {
        rec = linear_recon(op, m.y);
      } else {
        TVSolverConfig tv;
        tv.max_iter = o.max_iter;
        tv.data_epsilon = fidelity_radius(m.y, sigma);
        const ReconResult r = tv_min_recon(op, m.y, tv);
        rec = r.image;
        iterations = r.iterations;
        converged = r.converged;
      }
      const PsnrResult q = psnr(x, rec);
      const double residual = (op.apply(flatten(rec)) - m.y).norm();
      out << name << ',' << p << ',' << q.db << ',' << q.exact_match << ',' << iterations << ',' << converged << ','
          << residual << '\n';
      write_pgm(out_path(o, "recon_" + name + "_p" + std::to_string(p) + ".pgm"), rec);
      std::printf("%-10s p=%-6zu %7.3f dB%s\n", name.c_str(), p, q.db, converged ? "" : "  (not converged)");
    }
  }
}

void cmd_toy(const Options& o) {
  const Gmm2D mixture = o.mixture_file.empty() ? default_mixture() : Gmm2D::load(o.mixture_file);
  const auto rows = angle_sweep(mixture, o.angles, o.samples, o.seed);
  std::ostringstream prov;
  prov << "infosense toy mixture=" << (o.mixture_file.empty() ? "default" : o.mixture_file) << " samples=" << o.samples
       << " angles=" << o.angles << " random_directions=" << o.random_directions << " seed=" << o.seed;
  {
    std::ofstream out = open_out(out_path(o, "toy_sweep.csv"));
    write_sweep_csv(out, rows, prov.str());
  }
  const ToySummary s = toy_summary(mixture, o.samples, o.random_directions, o.seed);
  std::vector<double> h, mse;
  for (const auto& r : rows) {
    h.push_back(r.entropy);
    mse.push_back(r.mse);
  }
  std::ofstream out = open_out(out_path(o, "toy_summary.csv"));
  out << "# " << prov.str() << "\nscheme,theta,entropy_nats,mse\n";
  out << "infomax," << s.infomax_theta << ',' << s.infomax.entropy << ',' << s.infomax.mse << '\n';
  out << "pca," << s.pca_theta << ',' << s.pca.entropy << ',' << s.pca.mse << '\n';
  out << "random,," << s.random.entropy << ',' << s.random.mse << '\n';
  std::printf("scheme    entropy(nats)   MSE\n");
  std::printf("InfoMax   %12.4f   %.4f\n", s.infomax.entropy, s.infomax.mse);
  std::printf("PCA       %12.4f   %.4f\n", s.pca.entropy, s.pca.mse);
  std::printf("random    %12.4f   %.4f\n", s.random.entropy, s.random.mse);
  std::printf("Spearman(entropy, MSE) over %zu angles: %.4f\n", o.angles, spearman(h, mse));
}

void cmd_estimate_alpha(const Options& o) {
  if (o.image.empty()) throw std::invalid_argument("--image is required");
  const AlphaEstimate a = estimate_image_alpha(read_pgm(o.image));
  std::printf("alpha_hat=%.4f%s\n", a.alpha, a.clamped ? " (clamped to search range)" : "");
}

void cmd_synthesize(const Options& o) {
  const Image img = synthesize_multires_image(o.size, o.alpha, o.seed);
  const fs::path path = out_path(o, "synthetic_a" + std::to_string(o.alpha).substr(0, 4) + "_s" +
                                        std::to_string(o.seed) + ".pgm");
  write_pgm(path, img);
  std::cout << path.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Informative linear measurements for compressed sensing"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--alpha", o.alpha, "GG shape parameter")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--out-dir", o.out_dir, "output directory");
  };

  auto* capacity = app.add_subcommand("capacity", "capacity diagram and sensor allocation");
  common(capacity);
  capacity->add_option("--image", o.image, "calibrate band variances from this PGM")->check(CLI::ExistingFile);
  capacity->add_option("--size", o.size, "image side when no image is given");
  capacity->add_option("--pixel-std", o.pixel_std, "pixel std the model is scaled to when no image is given");
  capacity->add_option("--sigma", o.sigma, "noise std, one diagram each")->delimiter(',');
  capacity->add_option("--p", o.p, "sensor budget for the allocation");
  capacity->add_option("--calibration", o.calibration, "raw or fitted");

  auto* compare = app.add_subcommand("compare", "random vs PCA entropy curves");
  common(compare);
  compare->add_option("--gamma", o.gamma, "power-law exponent")->check(CLI::NonNegativeNumber);
  compare->add_option("--p-grid", o.p_grid, "comma-separated p values")->delimiter(',');
  compare->add_option("--source", o.source, "white, gaussian or hybrid");
  compare->add_option("--dim", o.dim, "signal dimension d");

  auto* sense = app.add_subcommand("sense", "measure, reconstruct and score an image");
  common(sense);
  sense->add_option("--image", o.image, "input PGM (a model image is synthesized if absent)")->check(CLI::ExistingFile);
  sense->add_option("--size", o.size, "side of the synthesized image");
  sense->add_option("--p-grid", o.p_grid, "comma-separated measurement counts")->delimiter(',');
  sense->add_option("--p", o.p_grid, "single measurement count");
  sense->add_option("--sigma", o.sigma, "measurement noise std")->delimiter(',');
  sense->add_option("--scheme", o.schemes, "dct-linear, dct-tv, romberg, random, uca")->delimiter(',');
  sense->add_option("--max-iter", o.max_iter, "TV iterations");
  sense->add_option("--calibration", o.calibration, "raw or fitted");

  auto* toy = app.add_subcommand("toy", "2D mixture projection demo");
  common(toy);
  toy->add_option("--mixture-file", o.mixture_file, "mixture JSON")->check(CLI::ExistingFile);
  toy->add_option("--samples", o.samples, "samples for the MSE estimates");
  toy->add_option("--angles", o.angles, "angles in the sweep");
  toy->add_option("--random-directions", o.random_directions, "random directions averaged");

  auto* estimate = app.add_subcommand("estimate-alpha", "GG shape of an image's Haar details");
  estimate->add_option("--image", o.image, "input PGM")->required()->check(CLI::ExistingFile);

  auto* synth = app.add_subcommand("synthesize", "write a PGM drawn from the multi-resolution model");
  common(synth);
  synth->add_option("--size", o.size, "image side");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*capacity) cmd_capacity(o);
    else if (*compare) cmd_compare(o);
    else if (*sense) cmd_sense(o);
    else if (*toy) cmd_toy(o);
    else if (*estimate) cmd_estimate_alpha(o);
    else if (*synth) cmd_synthesize(o);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
