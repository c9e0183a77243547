#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "infosense/entropy.hpp"
#include "infosense/ggdist.hpp"
#include "infosense/model.hpp"
#include "infosense/operators.hpp"
#include "infosense/recon.hpp"
#include "infosense/synthesis.hpp"
#include "infosense/toydemo.hpp"

namespace py = pybind11;
using namespace infosense;

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

KnnEntropyResult knn_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> points,
                                std::size_t k) {
  if (points.ndim() == 1) return knn_entropy({points.data(), static_cast<std::size_t>(points.size())}, 1, k);
  if (points.ndim() != 2) throw std::invalid_argument("points must be (n,) or (n, dim)");
  return knn_entropy({points.data(), static_cast<std::size_t>(points.size())},
                     static_cast<std::size_t>(points.shape(1)), k);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Informative linear measurement design, entropy analysis and TV reconstruction";

  py::register_exception<std::range_error>(m, "RangeError", PyExc_OverflowError);

  // shapes and sampling
  py::class_<GGParams>(m, "GGParams")
      .def(py::init<double, double, double>(), py::arg("alpha"), py::arg("mu") = 0.0, py::arg("sigma") = 1.0)
      .def_property_readonly("alpha", &GGParams::alpha)
      .def_property_readonly("mu", &GGParams::mu)
      .def_property_readonly("sigma", &GGParams::sigma)
      .def_property_readonly("beta", &GGParams::beta)
      .def_property_readonly("scale", &GGParams::scale);
  m.def(
      "gg_pdf", [](const Eigen::VectorXd& x, const GGParams& p) { return x.unaryExpr([&](double v) { return gg_pdf(v, p); }).eval(); },
      py::arg("x"), py::arg("params"));
  m.def(
      "gg_cdf", [](const Eigen::VectorXd& x, const GGParams& p) { return x.unaryExpr([&](double v) { return gg_cdf(v, p); }).eval(); },
      py::arg("x"), py::arg("params"));
  m.def("shape_term", &shape_term, py::arg("alpha"));
  m.def("gaussian_shape_term", &gaussian_shape_term);
  m.def(
      "gg_sample",
      [](const GGParams& p, std::size_t n, std::uint64_t seed) {
        auto v = gg_sample(p, n, seed);
        return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
      },
      py::arg("params"), py::arg("n"), py::arg("seed"));
  m.def(
      "noisy_shape_term", [](double alpha, double snr) { return noisy_shape_term(alpha, snr); }, py::arg("alpha"),
      py::arg("snr"));
  py::class_<AlphaEstimate>(m, "AlphaEstimate")
      .def_readonly("alpha", &AlphaEstimate::alpha)
      .def_readonly("clamped", &AlphaEstimate::clamped)
      .def("__repr__", [](const AlphaEstimate& a) {
        return "AlphaEstimate(alpha=" + std::to_string(a.alpha) + (a.clamped ? ", clamped)" : ")");
      });
  m.def(
      "estimate_alpha", [](const std::vector<double>& s) { return estimate_alpha(s); }, py::arg("samples"));

  // entropy analysis
  py::class_<KnnEntropyResult>(m, "KnnEntropyResult")
      .def_readonly("entropy", &KnnEntropyResult::entropy)
      .def_readonly("perturbed", &KnnEntropyResult::perturbed);
  m.def("knn_entropy", &knn_from_array, py::arg("points"), py::arg("k_neighbors") = 3);
  m.def("random_entropy_white", &random_entropy_white, py::arg("alpha"), py::arg("d"), py::arg("p"));
  m.def("pca_entropy_white", &pca_entropy_white, py::arg("alpha"), py::arg("p"));
  m.def("individual_capacity", &individual_capacity, py::arg("alpha"), py::arg("d"), py::arg("k"));
  m.def(
      "log_subvolume_expectation",
      [](const std::vector<double>& l, std::size_t p) { return log_subvolume_expectation(l, p); },
      py::arg("lambdas"), py::arg("p"));
  m.def(
      "subvolume_expectation", [](const std::vector<double>& l, std::size_t p) { return subvolume_expectation(l, p); },
      py::arg("lambdas"), py::arg("p"));
  m.def("random_entropy_gaussian_powerlaw", &random_entropy_gaussian_powerlaw, py::arg("gamma"), py::arg("d"),
        py::arg("p"));
  m.def("pca_entropy_gaussian_powerlaw", &pca_entropy_gaussian_powerlaw, py::arg("gamma"), py::arg("p"));
  m.def("hybrid_gap", &hybrid_gap, py::arg("alpha"), py::arg("gamma"), py::arg("d"), py::arg("p"));
  m.def("hybrid_gap_curve", &hybrid_gap_curve, py::arg("alpha"), py::arg("gamma"), py::arg("d"), py::arg("p_max"));
  m.def("random_orthonormal_rows", &random_orthonormal_rows, py::arg("p"), py::arg("d"), py::arg("seed"));

  // multi-resolution model
  py::class_<BandSpec>(m, "BandSpec")
      .def(py::init([](std::size_t level, std::size_t size, double variance) { return BandSpec{level, size, variance}; }),
           py::arg("level"), py::arg("size"), py::arg("variance"))
      .def_readonly("level", &BandSpec::level)
      .def_readonly("size", &BandSpec::size)
      .def_readonly("variance", &BandSpec::variance);
  py::class_<MultiResModel>(m, "MultiResModel")
      .def(py::init<std::vector<BandSpec>, double, std::size_t>(), py::arg("bands"), py::arg("alpha"),
           py::arg("side") = 0)
      .def_property_readonly("bands", &MultiResModel::bands)
      .def_property_readonly("alpha", &MultiResModel::alpha)
      .def_property_readonly("total_dim", &MultiResModel::total_dim)
      .def_property_readonly("side", &MultiResModel::side)
      .def("scaled", &MultiResModel::scaled, py::arg("factor"));
  m.def("natural_image_model", &natural_image_model, py::arg("width"), py::arg("height"), py::arg("alpha"));
  m.def("calibrate_to_pixel_variance", &calibrate_to_pixel_variance, py::arg("model"), py::arg("pixel_variance"));
  m.def(
      "calibrate_model",
      [](const MultiResModel& model, const RowMatrix& dct, const std::string& mode) {
        return calibrate_model(model, {dct.data(), static_cast<std::size_t>(dct.size())},
                               mode == "raw" ? CalibrationMode::kRaw : CalibrationMode::kFitted);
      },
      py::arg("model"), py::arg("dct_coefficients"), py::arg("mode") = "fitted");

  py::class_<CapacityDiagram>(m, "CapacityDiagram")
      .def_readonly("band_sizes", &CapacityDiagram::band_sizes)
      .def_readonly("sigma", &CapacityDiagram::sigma)
      .def_property_readonly("nu", [](const CapacityDiagram& d) {
        std::vector<double> v;
        for (const auto& e : d.entries) v.push_back(e.nu);
        return v;
      })
      .def_property_readonly("band", [](const CapacityDiagram& d) {
        std::vector<std::size_t> v;
        for (const auto& e : d.entries) v.push_back(e.band);
        return v;
      });
  m.def("capacity_diagram", &capacity_diagram, py::arg("model"), py::arg("sigma") = 0.0);
  m.def(
      "allocate", [](const CapacityDiagram& d, std::size_t p) { return allocate(d, p).per_band; },
      py::arg("diagram"), py::arg("p"));
  py::class_<ThresholdPlan>(m, "ThresholdPlan")
      .def_readonly("full_bands", &ThresholdPlan::full_bands)
      .def_readonly("partial_bands", &ThresholdPlan::partial_bands)
      .def_readonly("skipped_bands", &ThresholdPlan::skipped_bands)
      .def_readonly("residual_random_count", &ThresholdPlan::residual_random_count);
  m.def(
      "apply_threshold_rule",
      [](const std::vector<std::size_t>& per_band, const MultiResModel& model) {
        return apply_threshold_rule(Allocation{per_band}, model);
      },
      py::arg("allocation"), py::arg("model"));

  // transforms and operators
  m.def(
      "dct2_forward", [](const Image& im) { return Dct2(static_cast<std::size_t>(im.rows())).forward(im); },
      py::arg("image"));
  m.def(
      "dct2_inverse", [](const Image& c) { return Dct2(static_cast<std::size_t>(c.rows())).inverse(c); },
      py::arg("coefficients"));
  m.def("haar2_forward", &haar2_forward, py::arg("image"));
  m.def("haar2_inverse", &haar2_inverse, py::arg("coefficients"));
  m.def("zigzag_order", &zigzag_order, py::arg("n"));

  py::class_<LinearOperator>(m, "LinearOperator")
      .def_property_readonly("in_dim", &LinearOperator::in_dim)
      .def_property_readonly("out_dim", &LinearOperator::out_dim)
      .def_property_readonly("name", &LinearOperator::name)
      .def("apply", &LinearOperator::apply, py::arg("x"))
      .def("adjoint", &LinearOperator::adjoint, py::arg("y"));
  m.def("random_mixing_operator", &random_mixing_operator, py::arg("n"), py::arg("m"), py::arg("seed"));
  m.def(
      "build_scheme",
      [](const std::string& scheme, const MultiResModel& model, std::size_t p, std::uint64_t seed, double sigma,
         std::size_t n_dct) {
        SchemeConfig cfg;
        cfg.scheme = scheme;
        cfg.p = p;
        cfg.seed = seed;
        cfg.sigma = sigma;
        cfg.n_dct = n_dct;
        return build_scheme(make_scheme_spec(cfg, model), model, p);
      },
      py::arg("scheme"), py::arg("model"), py::arg("p"), py::arg("seed") = 0, py::arg("sigma") = 0.0,
      py::arg("n_dct") = 1000);

  // reconstruction
  m.def(
      "linear_recon", [](const LinearOperator& op, const Eigen::VectorXd& y) { return linear_recon(op, y); },
      py::arg("op"), py::arg("y"));
  py::class_<ReconResult>(m, "ReconResult")
      .def_readonly("image", &ReconResult::image)
      .def_readonly("iterations", &ReconResult::iterations)
      .def_readonly("tv", &ReconResult::tv)
      .def_readonly("converged", &ReconResult::converged);
  m.def(
      "tv_min_recon",
      [](const LinearOperator& op, const Eigen::VectorXd& y, std::size_t max_iter, double data_epsilon, double tol) {
        TVSolverConfig cfg;
        cfg.max_iter = max_iter;
        cfg.data_epsilon = data_epsilon;
        cfg.tol = tol;
        return tv_min_recon(op, y, cfg);
      },
      py::arg("op"), py::arg("y"), py::arg("max_iter") = 2000, py::arg("data_epsilon") = 0.0, py::arg("tol") = 1e-6);
  m.def("total_variation", &total_variation, py::arg("image"));
  m.def(
      "psnr",
      [](const Image& ref, const Image& cand, double peak) {
        const PsnrResult r = psnr(ref, cand, peak);
        return py::make_tuple(r.db, r.exact_match);
      },
      py::arg("reference"), py::arg("candidate"), py::arg("peak") = 255.0);

  m.def("synthesize_multires_image", &synthesize_multires_image, py::arg("side"), py::arg("alpha"), py::arg("seed"),
        py::arg("pixel_std") = 40.0, py::arg("mean") = 128.0);
  m.def("estimate_image_alpha", &estimate_image_alpha, py::arg("image"));

  // 2D toy
  py::class_<Gmm2D>(m, "Gmm2D")
      .def_static("from_json", &Gmm2D::from_json, py::arg("text"))
      .def("to_json", &Gmm2D::to_json)
      .def("mean", &Gmm2D::mean)
      .def("covariance", &Gmm2D::covariance)
      .def("sample", &Gmm2D::sample, py::arg("n"), py::arg("seed"));
  m.def("default_mixture", &default_mixture);
  m.def("projection_entropy", &projection_entropy, py::arg("mixture"), py::arg("w"));
  m.def(
      "infomax_projection",
      [](const Gmm2D& mix, std::size_t n) {
        const InfomaxResult r = infomax_projection(mix, n);
        return py::make_tuple(r.w, r.entropy);
      },
      py::arg("mixture"), py::arg("n_angles") = 180);
  m.def("pca_direction", &pca_direction, py::arg("mixture"));
  m.def(
      "toy_summary",
      [](const Gmm2D& mix, std::size_t n, std::size_t dirs, std::uint64_t seed) {
        const ToySummary s = toy_summary(mix, n, dirs, seed);
        py::dict d;
        d["infomax"] = py::make_tuple(s.infomax.entropy, s.infomax.mse);
        d["pca"] = py::make_tuple(s.pca.entropy, s.pca.mse);
        d["random"] = py::make_tuple(s.random.entropy, s.random.mse);
        d["infomax_theta"] = s.infomax_theta;
        d["pca_theta"] = s.pca_theta;
        return d;
      },
      py::arg("mixture"), py::arg("n_samples") = 10000, py::arg("random_directions") = 1000, py::arg("seed") = 0);
}
