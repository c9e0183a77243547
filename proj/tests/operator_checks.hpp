#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "infosense/operators.hpp"

namespace infosense::testing {

struct OperatorErrors {
  double row_orthonormality = 0.0;  // max |W W^T y - y|
  double adjoint = 0.0;             // max |<Wu, v> - <u, W^T v>| relative to |u||v|
};

inline OperatorErrors operator_errors(const LinearOperator& op, std::size_t trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  auto random_vector = [&](std::size_t n) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (auto& x : v) x = g(rng);
    return v;
  };
  OperatorErrors e;
  for (std::size_t t = 0; t < trials; ++t) {
    const Eigen::VectorXd u = random_vector(op.in_dim());
    const Eigen::VectorXd v = random_vector(op.out_dim());
    e.row_orthonormality = std::max(e.row_orthonormality, (op.apply(op.adjoint(v)) - v).cwiseAbs().maxCoeff());
    const double lhs = op.apply(u).dot(v);
    const double rhs = u.dot(op.adjoint(v));
    e.adjoint = std::max(e.adjoint, std::abs(lhs - rhs) / (u.norm() * v.norm()));
  }
  return e;
}

/// Column j is apply(e_j).
inline Eigen::MatrixXd dense_matrix(const LinearOperator& op) {
  Eigen::MatrixXd w(static_cast<Eigen::Index>(op.out_dim()), static_cast<Eigen::Index>(op.in_dim()));
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    w.col(j) = op.apply(Eigen::VectorXd::Unit(w.cols(), j));
  }
  return w;
}

/// Orthonormal DCT-II matrix from the cosine formula.
inline Eigen::MatrixXd dct_matrix(std::size_t n) {
  Eigen::MatrixXd c(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      c(k, i) = scale * std::cos(std::numbers::pi * (2.0 * i + 1.0) * k / (2.0 * n));
    }
  }
  return c;
}

/// Row r * n + c maps a row-major flattened image to DCT coefficient (r, c).
inline Eigen::MatrixXd dct2_matrix(std::size_t n) {
  const Eigen::MatrixXd c = dct_matrix(n);
  Eigen::MatrixXd k(static_cast<Eigen::Index>(n * n), static_cast<Eigen::Index>(n * n));
  for (Eigen::Index a = 0; a < c.rows(); ++a)
    for (Eigen::Index b = 0; b < c.cols(); ++b) k.block(a * c.rows(), b * c.cols(), c.rows(), c.cols()) = c(a, b) * c;
  return k;
}

}  // namespace infosense::testing
