#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "infosense/gmm.hpp"
#include "infosense/toydemo.hpp"

using namespace infosense;

namespace {

const double c2 = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);

Gmm2D gaussian(const Eigen::Matrix2d& cov, Eigen::Vector2d mean = Eigen::Vector2d::Zero()) {
  return Gmm2D({GaussianComponent{1.0, mean, cov}});
}

Eigen::Matrix2d rotation(double phi) {
  Eigen::Matrix2d r;
  r << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  return r;
}

double angle_distance(double a, double b) {
  const double d = std::fmod(std::abs(a - b), std::numbers::pi);
  return std::min(d, std::numbers::pi - d);
}

}  // namespace

TEST_SUITE("toydemo") {
  TEST_CASE("mixture validation and moments") {
    CHECK_THROWS(Gmm2D({}));
    CHECK_THROWS(Gmm2D({GaussianComponent{0.5, {}, Eigen::Matrix2d::Identity()}}));
    Eigen::Matrix2d asym;
    asym << 1.0, 0.5, 0.1, 1.0;
    CHECK_THROWS(Gmm2D({GaussianComponent{1.0, {}, asym}}));
    Eigen::Matrix2d singular;
    singular << 1.0, 1.0, 1.0, 1.0;
    CHECK_THROWS(Gmm2D({GaussianComponent{1.0, {}, singular}}));

    const Gmm2D m = default_mixture();
    const auto x = m.sample(200000, 4);
    const Eigen::Vector2d mean = x.colwise().mean().transpose();
    const Eigen::MatrixXd centred = x.rowwise() - mean.transpose();
    const Eigen::Matrix2d cov = centred.transpose() * centred / static_cast<double>(x.rows());
    CHECK((mean - m.mean()).norm() < 0.02);
    CHECK((cov - m.covariance()).cwiseAbs().maxCoeff() < 0.03);
    CHECK(m.sample(10, 1) == m.sample(10, 1));
  }

  TEST_CASE("mixture JSON") {
    const Gmm2D m = default_mixture();
    const Gmm2D back = Gmm2D::from_json(m.to_json());
    REQUIRE(back.components().size() == m.components().size());
    for (std::size_t i = 0; i < m.components().size(); ++i) {
      CHECK(back.components()[i].weight == m.components()[i].weight);
      CHECK(back.components()[i].mean == m.components()[i].mean);
      CHECK(back.components()[i].covariance == m.components()[i].covariance);
    }
    const Gmm2D shipped = Gmm2D::load(INFOSENSE_DATA_DIR "/default_mixture.json");
    CHECK(shipped.covariance().isApprox(m.covariance()));
    CHECK_THROWS(Gmm2D::from_json("{"));
    CHECK_THROWS(Gmm2D::from_json(R"({"parts": []})"));
    CHECK_THROWS(Gmm2D::from_json(R"({"components": [{"weight": 1, "mean": [0], "covariance": [[1,0],[0,1]]}]})"));
    CHECK_THROWS(Gmm2D::load("/nonexistent/mixture.json"));
  }

  TEST_CASE("projection entropy") {
    const Gmm2D unit = gaussian(Eigen::Matrix2d::Identity());
    for (double theta : {0.0, 0.4, 2.0}) CHECK(projection_entropy(unit, direction(theta)) == doctest::Approx(c2).epsilon(1e-9));

    const Gmm2D m = default_mixture();
    auto scaled = m.components();
    for (auto& c : scaled) {
      c.mean *= 3.0;
      c.covariance *= 9.0;
    }
    const Eigen::Vector2d w = direction(1.1);
    CHECK(projection_entropy(Gmm2D(scaled), w) == doctest::Approx(projection_entropy(m, w) + std::log(3.0)).epsilon(1e-8));

    const Gmm2D apart({GaussianComponent{0.5, Eigen::Vector2d(-10, 0), Eigen::Matrix2d::Identity()},
                       GaussianComponent{0.5, Eigen::Vector2d(10, 0), Eigen::Matrix2d::Identity()}});
    CHECK(projection_entropy(apart, Eigen::Vector2d::UnitX()) == doctest::Approx(c2 + std::log(2.0)).epsilon(1e-8));
    CHECK_THROWS(projection_entropy(unit, Eigen::Vector2d(1, 1)));
  }

  TEST_CASE("InfoMax direction") {
    const auto iso = infomax_projection(gaussian(Eigen::Matrix2d::Identity()));
    CHECK(iso.theta == 0.0);
    const auto wide_x = infomax_projection(gaussian(Eigen::Vector2d(4, 1).asDiagonal()));
    CHECK(angle_distance(wide_x.theta, 0.0) < 1e-3);
    const auto wide_y = infomax_projection(gaussian(Eigen::Vector2d(1, 4).asDiagonal()));
    CHECK(angle_distance(wide_y.theta, std::numbers::pi / 2) < 1e-3);
    CHECK(wide_y.w.norm() == doctest::Approx(1.0));
    CHECK_THROWS(infomax_projection(default_mixture(), 8));

    const Gmm2D m = default_mixture();
    const auto best = infomax_projection(m);
    CHECK(best.entropy >= projection_entropy(m, pca_direction(m)));
    CHECK(best.theta >= 0.0);
    CHECK(best.theta < std::numbers::pi);
  }

  TEST_CASE("InfoMax follows a rotation of the mixture") {
    const Gmm2D m = default_mixture();
    const double base = infomax_projection(m).theta;
    for (double phi : {0.3, 1.2, 2.5}) {
      const double turned = infomax_projection(m.rotated(rotation(phi))).theta;
      CAPTURE(phi);
      CHECK(angle_distance(turned, base + phi) < std::numbers::pi / 180.0);
    }
  }

  TEST_CASE("PCA direction") {
    const Eigen::Vector2d w = pca_direction(gaussian(Eigen::Vector2d(1, 4).asDiagonal()));
    CHECK(std::abs(w.dot(Eigen::Vector2d::UnitY())) == doctest::Approx(1.0));
    const Eigen::Vector2d v = pca_direction(default_mixture());
    const Eigen::Matrix2d s = default_mixture().covariance();
    CHECK((s * v - v.dot(s * v) * v).norm() < 1e-10);
    CHECK(v.dot(s * v) >= s.eigenvalues().real().maxCoeff() - 1e-10);
  }

  TEST_CASE("scheme evaluation and sweep") {
    const Gmm2D m = default_mixture();
    CHECK_THROWS(evaluate_scheme(m, direction(0.0), 999, 1));
    const auto a = evaluate_scheme(m, direction(0.5), 2000, 3);
    const auto b = evaluate_scheme(m, direction(0.5), 2000, 3);
    CHECK(a.mse == b.mse);
    CHECK(a.mse > 0.0);
    const auto rows = angle_sweep(m, 16, 2000, 3);
    REQUIRE(rows.size() == 16);
    CHECK(rows[4].theta == doctest::Approx(std::numbers::pi / 4));
    CHECK(rows[0].mse == evaluate_scheme(m, direction(0.0), 2000, 3).mse);
    std::ostringstream out;
    write_sweep_csv(out, rows, "seed=3 n=2000");
    CHECK(out.str().rfind("# seed=3 n=2000\ntheta,entropy_nats,mse\n", 0) == 0);
  }

  TEST_CASE("Spearman correlation") {
    const std::vector<double> a{1, 2, 3, 4, 5};
    const std::vector<double> up{2, 4, 8, 16, 100};
    const std::vector<double> down{9, 7, 5, 3, 1};
    CHECK(spearman(a, up) == doctest::Approx(1.0));
    CHECK(spearman(a, down) == doctest::Approx(-1.0));
    const std::vector<double> tied{1, 1, 2, 3, 3};
    // average ranks 1.5 1.5 3 4.5 4.5 against 1..5
    CHECK(spearman(a, tied) == doctest::Approx(0.9486832981).epsilon(1e-9));
    CHECK_THROWS(spearman(a, std::vector<double>{1, 2}));
    CHECK_THROWS(spearman(a, std::vector<double>(5, 1.0)));
  }

  TEST_CASE("summary ordering on the default mixture") {
    const auto s = toy_summary(default_mixture(), 10000, 200, 1);
    CHECK(s.infomax.entropy >= s.pca.entropy);
    CHECK(s.infomax.mse < s.pca.mse);
    CHECK(s.pca.mse < s.random.mse);
    CHECK_THROWS(toy_summary(default_mixture(), 10000, 0, 1));
  }
}
