// Shared scalar/matrix kernels: matrix row norms, the sigmoid activation,
// and finiteness checks used by every other module.

#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "gastl/errors.hpp"

namespace gastl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline void require_finite(const Matrix& m, const char* name) {
  if (!m.allFinite()) {
    throw invalid_input_error(std::string(name) + " contains non-finite entries");
  }
}

// (sum_i (sum_j |W(i,j)|^r)^(p/r))^(1/p), rows i, columns j.
// The r == 2 and p == 1 paths use sqrt / plain summation so that the common
// row-norm cases agree bit-for-bit with l21_norm below.
inline double lrp_norm(const Matrix& w, double r, double p) {
  require_finite(w, "lrp_norm input");
  if (!(r > 0.0) || !(p > 0.0)) {
    throw invalid_input_error("lrp_norm requires r > 0 and p > 0");
  }
  double outer = 0.0;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    double inner = 0.0;
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      const double a = std::abs(w(i, j));
      inner += (r == 2.0) ? a * a : std::pow(a, r);
    }
    const double ratio = p / r;
    double row_term;
    if (ratio == 1.0) {
      row_term = inner;
    } else if (ratio == 0.5) {
      row_term = std::sqrt(inner);
    } else {
      row_term = std::pow(inner, ratio);
    }
    outer += row_term;
  }
  if (p == 1.0) return outer;
  if (p == 2.0) return std::sqrt(outer);
  return std::pow(outer, 1.0 / p);
}

// Sum of per-row Euclidean norms; equals lrp_norm(w, 2, 1).
inline double l21_norm(const Matrix& w) {
  require_finite(w, "l21_norm input");
  double total = 0.0;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    double sq = 0.0;
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      const double a = std::abs(w(i, j));
      sq += a * a;
    }
    total += std::sqrt(sq);
  }
  return total;
}

// Numerically stable logistic function; for z < 0 computed as
// exp(z) / (1 + exp(z)) so exp never overflows.
inline double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline Matrix sigmoid(const Matrix& m) {
  return m.unaryExpr([](double z) { return sigmoid(z); });
}

}  // namespace gastl
