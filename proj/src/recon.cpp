#include "infosense/recon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace infosense {

namespace {

std::size_t side_of(const LinearOperator& op) {
  const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(op.in_dim()))));
  if (n * n != op.in_dim()) throw std::invalid_argument("operator input is not a square image");
  return n;
}

// Forward differences, zero across the last row/column.
void gradient(const Image& x, Image& gx, Image& gy) {
  const Eigen::Index n = x.rows(), m = x.cols();
  gx.setZero(n, m);
  gy.setZero(n, m);
  gx.topRows(n - 1) = x.bottomRows(n - 1) - x.topRows(n - 1);
  gy.leftCols(m - 1) = x.rightCols(m - 1) - x.leftCols(m - 1);
}

// Adjoint of gradient (minus the divergence).
Image gradient_adjoint(const Image& gx, const Image& gy) {
  const Eigen::Index n = gx.rows(), m = gx.cols();
  Image out = Image::Zero(n, m);
  out.topRows(n - 1) -= gx.topRows(n - 1);
  out.bottomRows(n - 1) += gx.topRows(n - 1);
  out.leftCols(m - 1) -= gy.leftCols(m - 1);
  out.rightCols(m - 1) += gy.leftCols(m - 1);
  return out;
}

double frob(const Image& a) { return a.norm(); }

}  // namespace

Image linear_recon(const LinearOperator& op, const Eigen::VectorXd& y) {
  const std::size_t n = side_of(op);
  return unflatten(op.adjoint(y), n, n);
}

void TVSolverConfig::validate() const {
  if (max_iter == 0) throw std::invalid_argument("TVSolverConfig: max_iter must be >= 1");
  if (!(tau > 0.0) || !(sigma > 0.0)) throw std::invalid_argument("TVSolverConfig: steps must be > 0");
  if (tau * sigma * kGradientNormSq > 1.0 + 1e-12) {
    throw std::invalid_argument("TVSolverConfig: tau * sigma * 8 must be <= 1");
  }
  if (!(data_epsilon >= 0.0)) throw std::invalid_argument("TVSolverConfig: data_epsilon must be >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("TVSolverConfig: tol must be > 0");
}

double fidelity_radius(const Eigen::VectorXd& y, double noise_sigma) {
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("fidelity_radius: sigma must be >= 0");
  return std::max(1e-6 * y.norm(), noise_sigma * std::sqrt(static_cast<double>(y.size())));
}

double total_variation(const Image& image) {
  Image gx, gy;
  gradient(image, gx, gy);
  return (gx.array().square() + gy.array().square()).sqrt().sum();
}

ReconResult tv_min_recon(const LinearOperator& op, const Eigen::VectorXd& y,
                         const TVSolverConfig& config) {
  config.validate();
  const std::size_t n = side_of(op);
  if (static_cast<std::size_t>(y.size()) != op.out_dim()) {
    throw std::invalid_argument("tv_min_recon: measurement length does not match operator");
  }
  const double epsilon = std::max(config.data_epsilon, 1e-6 * y.norm());
  const double tau = config.tau, sigma = config.sigma;

  auto project = [&](Image& x) {
    const Eigen::VectorXd r = op.apply(flatten(x)) - y;
    const double nr = r.norm();
    if (nr > epsilon) {
      const Eigen::VectorXd back = op.adjoint(r * (1.0 - epsilon / nr));
      x -= unflatten(back, n, n);
    }
  };

  Image x = linear_recon(op, y);
  project(x);
  Image x_bar = x;
  const auto en = static_cast<Eigen::Index>(n);
  Image qx = Image::Zero(en, en), qy = Image::Zero(en, en);
  Image gx, gy;

  ReconResult result;
  result.image = x;
  result.tv = total_variation(x);
  double best_tv = result.tv;

  for (std::size_t it = 1; it <= config.max_iter; ++it) {
    const Image qx_prev = qx, qy_prev = qy;
    gradient(x_bar, gx, gy);
    qx += sigma * gx;
    qy += sigma * gy;
    const Eigen::ArrayXXd mag = (qx.array().square() + qy.array().square()).sqrt().max(1.0);
    qx.array() /= mag;
    qy.array() /= mag;

    const Image x_prev = x;
    x -= tau * gradient_adjoint(qx, qy);
    project(x);
    x_bar = 2.0 * x - x_prev;

    const double tv = total_variation(x);
    if (tv < best_tv) {
      best_tv = tv;
      result.image = x;
    }
    result.tv_history.push_back(best_tv);
    result.iterations = it;

    const Image dx = x_prev - x;
    const Image dqx = qx_prev - qx, dqy = qy_prev - qy;
    const double primal_res = frob(dx / tau - gradient_adjoint(dqx, dqy));
    Image gdx, gdy;
    gradient(dx, gdx, gdy);
    const double dual_res = std::sqrt((dqx / sigma - gdx).squaredNorm() + (dqy / sigma - gdy).squaredNorm());
    gradient(x, gx, gy);
    const double primal_scale = frob(x) / tau + frob(gradient_adjoint(qx, qy)) + 1e-300;
    const double dual_scale = std::sqrt(qx.squaredNorm() + qy.squaredNorm()) / sigma +
                              std::sqrt(gx.squaredNorm() + gy.squaredNorm()) + 1e-300;
    if (primal_res / primal_scale < config.tol && dual_res / dual_scale < config.tol) {
      result.converged = true;
      break;
    }
  }
  result.tv = best_tv;
  result.residual = (op.apply(flatten(result.image)) - y).norm();
  return result;
}

PsnrResult psnr(const Image& reference, const Image& candidate, double peak) {
  if (reference.rows() != candidate.rows() || reference.cols() != candidate.cols()) {
    throw std::invalid_argument("psnr: image sizes differ");
  }
  if (!(peak > 0.0)) throw std::invalid_argument("psnr: peak must be > 0");
  const double mse = (reference - candidate).squaredNorm() / static_cast<double>(reference.size());
  if (mse == 0.0) return {kPsnrCap, true};
  const double db = 10.0 * std::log10(peak * peak / mse);
  if (db >= kPsnrCap) return {kPsnrCap, true};
  return {db, false};
}

Eigen::Vector2d bls_estimate(const Gmm2D& mixture, const Eigen::Vector2d& w, double y) {
  if (std::abs(w.norm() - 1.0) > 1e-9) throw std::invalid_argument("bls_estimate: w must be unit norm");
  if (!std::isfinite(y)) throw std::invalid_argument("bls_estimate: y must be finite");
  const auto& comps = mixture.components();
  std::vector<double> log_resp(comps.size());
  std::vector<Eigen::Vector2d> cond(comps.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < comps.size(); ++c) {
    const Eigen::Vector2d sw = comps[c].covariance * w;
    const double v = w.dot(sw);
    if (!(v > 1e-300)) throw std::invalid_argument("bls_estimate: projected variance is singular");
    const double m = w.dot(comps[c].mean);
    log_resp[c] = std::log(comps[c].weight) - 0.5 * std::log(2.0 * std::numbers::pi * v) -
                  0.5 * (y - m) * (y - m) / v;
    cond[c] = comps[c].mean + sw * ((y - m) / v);
    top = std::max(top, log_resp[c]);
  }
  Eigen::Vector2d num = Eigen::Vector2d::Zero();
  double den = 0.0;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    const double r = std::exp(log_resp[c] - top);
    num += r * cond[c];
    den += r;
  }
  return num / den;
}

}  // namespace infosense
