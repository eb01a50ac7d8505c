// Solver for the transformation-matrix subproblem
//   F2(A) = (mu / (2 n_trg)) ||X_src A - H||_F^2 + lambda ||A||_{2,1}
// via iteratively reweighted least squares: with the diagonal reweighting
// U_ii = 1 / (||A_(i)|| + eps) (0 for all-zero rows) each update solves
//   (mu X_src^T X_src + n_trg lambda U) A = mu X_src^T H
// which is the stationarity condition of the smoothed objective. U acts on
// the rows of A (one entry per source sample), so the regularizer derivative
// is U A; any other shape fails to type-check against the system above.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gastl/errors.hpp"
#include "gastl/numerics.hpp"

namespace gastl {

struct ReweightDiagonal {
  Vector u;                 // n_src diagonal entries, all >= 0
  double epsilon = 1e-8;
};

inline ReweightDiagonal update_U(const Matrix& a, double epsilon = 1e-8) {
  if (epsilon <= 0.0) throw invalid_input_error("update_U: epsilon must be > 0");
  ReweightDiagonal d;
  d.epsilon = epsilon;
  d.u = Vector(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double r = a.row(i).norm();
    d.u(i) = (r == 0.0) ? 0.0 : 1.0 / (r + epsilon);
  }
  return d;
}

// F2 value for a candidate A.
inline double f2_value(const Matrix& x_src, const Matrix& h, const Matrix& a,
                       double mu, double lambda) {
  return mu * (x_src * a - h).squaredNorm() / (2.0 * static_cast<double>(h.cols())) +
         lambda * l21_norm(a);
}

namespace detail {

// Symmetric solve with a singularity check on the LDLT pivots; retries once
// with a small ridge before giving up.
inline Matrix solve_spd(Matrix m, const Matrix& rhs) {
  const Eigen::Index n = m.rows();
  for (int attempt = 0; attempt < 2; ++attempt) {
    Eigen::LDLT<Matrix> ldlt(m);
    const Vector dvec = ldlt.vectorD();
    const double dmax = dvec.maxCoeff();
    const double dmin = dvec.minCoeff();
    if (ldlt.info() == Eigen::Success && dmin > 0.0 && dmin >= 1e-12 * dmax) {
      return ldlt.solve(rhs);
    }
    if (attempt == 0) {
      const double ridge = 1e-10 * m.trace() / static_cast<double>(n);
      if (ridge > 0.0) {
        m.diagonal().array() += ridge;
        continue;
      }
    }
    throw numerical_error("solve_A_given_U: system singular, smallest pivot " +
                          std::to_string(dmin));
  }
  throw numerical_error("solve_A_given_U: system singular");
}

}  // namespace detail

// Closed-form A for a fixed reweighting diagonal.
inline Matrix solve_A_given_U(const Matrix& x_src, const Matrix& h,
                              const ReweightDiagonal& u, double mu, double lambda) {
  if (mu <= 0.0) throw invalid_input_error("solve_A_given_U: mu must be > 0");
  if (lambda < 0.0) throw invalid_input_error("solve_A_given_U: lambda must be >= 0");
  if (x_src.rows() != h.rows()) {
    throw dimension_error("solve_A_given_U: X_src and H dimensions disagree");
  }
  if (u.u.size() != x_src.cols()) {
    throw dimension_error("solve_A_given_U: U must have one entry per source sample");
  }
  const double n_trg = static_cast<double>(h.cols());
  Matrix m = mu * (x_src.transpose() * x_src);
  m.diagonal() += (n_trg * lambda) * u.u;
  const Matrix rhs = mu * (x_src.transpose() * h);
  Matrix a = detail::solve_spd(std::move(m), rhs);
  if (!all_finite(a)) throw numerical_error("solve_A_given_U: non-finite solution");
  return a;
}

struct IrlsResult {
  Matrix a;                     // n_src x n_trg
  std::vector<double> history;  // F2 value per iteration, warm start first
};

// Alternates update_U / solve_A_given_U starting from the pure least-squares
// solution (U = 0). Stops when |F2_t - F2_{t-1}| <= tol * max(1, |F2_{t-1}|)
// or after max_iter reweighting rounds.
inline IrlsResult irls_solve(const Matrix& x_src, const Matrix& h, double mu,
                             double lambda, double epsilon = 1e-8,
                             double tol = 1e-6, int max_iter = 50) {
  if (tol <= 0.0) throw invalid_input_error("irls_solve: tol must be > 0");
  if (max_iter < 1) throw invalid_input_error("irls_solve: max_iter must be >= 1");

  IrlsResult res;
  ReweightDiagonal u;
  u.epsilon = epsilon;
  u.u = Vector::Zero(x_src.cols());
  res.a = solve_A_given_U(x_src, h, u, mu, lambda);
  res.history.push_back(f2_value(x_src, h, res.a, mu, lambda));

  for (int it = 0; it < max_iter; ++it) {
    u = update_U(res.a, epsilon);
    res.a = solve_A_given_U(x_src, h, u, mu, lambda);
    const double f2 = f2_value(x_src, h, res.a, mu, lambda);
    const double prev = res.history.back();
    res.history.push_back(f2);
    if (std::abs(f2 - prev) <= tol * std::max(1.0, std::abs(prev))) break;
  }
  return res;
}

}  // namespace gastl
