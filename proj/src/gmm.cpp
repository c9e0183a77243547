#include "infosense/gmm.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "json.hpp"

namespace infosense {

Gmm2D::Gmm2D(std::vector<GaussianComponent> components) : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("Gmm2D: no components");
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight > 0.0)) throw std::invalid_argument("Gmm2D: weights must be > 0");
    if (!c.mean.allFinite()) throw std::invalid_argument("Gmm2D: non-finite mean");
    const Eigen::Matrix2d& s = c.covariance;
    if (std::abs(s(0, 1) - s(1, 0)) > 1e-12 * (std::abs(s(0, 1)) + 1.0)) {
      throw std::invalid_argument("Gmm2D: covariance must be symmetric");
    }
    if (!(s(0, 0) > 0.0) || !(s.determinant() > 0.0)) {
      throw std::invalid_argument("Gmm2D: covariance must be positive definite");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("Gmm2D: weights must sum to 1");
}

Eigen::Vector2d Gmm2D::mean() const {
  Eigen::Vector2d m = Eigen::Vector2d::Zero();
  for (const auto& c : components_) m += c.weight * c.mean;
  return m;
}

Eigen::Matrix2d Gmm2D::covariance() const {
  const Eigen::Vector2d m = mean();
  Eigen::Matrix2d s = Eigen::Matrix2d::Zero();
  for (const auto& c : components_) {
    const Eigen::Vector2d dm = c.mean - m;
    s += c.weight * (c.covariance + dm * dm.transpose());
  }
  return s;
}

Gmm2D Gmm2D::rotated(const Eigen::Matrix2d& rotation) const {
  auto comps = components_;
  for (auto& c : comps) {
    c.mean = rotation * c.mean;
    c.covariance = rotation * c.covariance * rotation.transpose();
    c.covariance = 0.5 * (c.covariance + c.covariance.transpose()).eval();
  }
  return Gmm2D(std::move(comps));
}

Eigen::Matrix<double, Eigen::Dynamic, 2> Gmm2D::sample(std::size_t n, std::uint64_t seed) const {
  if (n == 0) throw std::invalid_argument("Gmm2D::sample: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<double> weights;
  std::vector<Eigen::Matrix2d> factors;
  for (const auto& c : components_) {
    weights.push_back(c.weight);
    factors.push_back(c.covariance.llt().matrixL());
  }
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::normal_distribution<double> normal;
  Eigen::Matrix<double, Eigen::Dynamic, 2> out(static_cast<Eigen::Index>(n), 2);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const std::size_t c = pick(rng);
    const double z0 = normal(rng);
    const double z1 = normal(rng);
    out.row(i) = (components_[c].mean + factors[c] * Eigen::Vector2d(z0, z1)).transpose();
  }
  return out;
}

Gmm2D Gmm2D::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("mixture JSON: ") + e.what());
  }
  if (!doc.contains("components") || !doc["components"].is_array()) {
    throw std::invalid_argument("mixture JSON: missing \"components\" array");
  }
  std::vector<GaussianComponent> comps;
  try {
    for (const auto& item : doc["components"]) {
      GaussianComponent c;
      c.weight = item.at("weight").get<double>();
      const auto& m = item.at("mean");
      const auto& s = item.at("covariance");
      if (m.size() != 2 || s.size() != 2 || s[0].size() != 2 || s[1].size() != 2) {
        throw std::invalid_argument("mixture JSON: mean must have 2 entries, covariance 2x2");
      }
      c.mean = {m[0].get<double>(), m[1].get<double>()};
      c.covariance << s[0][0].get<double>(), s[0][1].get<double>(), s[1][0].get<double>(),
          s[1][1].get<double>();
      comps.push_back(c);
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("mixture JSON: ") + e.what());
  }
  return Gmm2D(std::move(comps));
}

Gmm2D Gmm2D::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mixture file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::string Gmm2D::to_json() const {
  nlohmann::json doc;
  doc["components"] = nlohmann::json::array();
  for (const auto& c : components_) {
    doc["components"].push_back({{"weight", c.weight},
                                 {"mean", {c.mean[0], c.mean[1]}},
                                 {"covariance",
                                  {{c.covariance(0, 0), c.covariance(0, 1)},
                                   {c.covariance(1, 0), c.covariance(1, 1)}}}});
  }
  return doc.dump(2);
}

}  // namespace infosense
