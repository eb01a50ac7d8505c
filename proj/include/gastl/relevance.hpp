// Relevance scoring of source samples from the fitted transformation matrix:
// normalized row-norm weights, per-class transferability (scheme A from A's
// entries, scheme B from Gaussian densities over hidden representations),
// pseudo-label assignment, and top-p selection.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gastl/autoencoder.hpp"
#include "gastl/errors.hpp"
#include "gastl/numerics.hpp"

namespace gastl {

enum class Scheme { A, B };
enum class LabelMode { soft, hard };

// Wt(i) = ||A_(i)|| / max_j ||A_(j)||; identically zero A gives all-zero
// weights rather than 0/0.
inline Vector source_weights(const Matrix& a) {
  Vector wt(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) wt(i) = a.row(i).norm();
  const double top = wt.size() > 0 ? wt.maxCoeff() : 0.0;
  if (top > 0.0) wt /= top;
  return wt;
}

struct TransferabilityMatrix {
  Matrix tr;                      // n_src x n_ctrg, non-negative
  std::optional<Matrix> log_tr;   // scheme B keeps log densities for stable soft labels
  Scheme scheme = Scheme::A;
};

// Tr(i, j) = sum of A(i, t)^2 over target columns t of class j, so each row
// of Tr partitions the squared row norm of A.
inline TransferabilityMatrix transferability_scheme_A(const Matrix& a,
                                                      const std::vector<int>& y_trg,
                                                      int n_ctrg) {
  if (static_cast<Eigen::Index>(y_trg.size()) != a.cols()) {
    throw dimension_error("transferability A: labels must cover A's columns");
  }
  if (n_ctrg < 1) throw invalid_input_error("transferability A: n_ctrg must be >= 1");
  TransferabilityMatrix out;
  out.scheme = Scheme::A;
  out.tr = Matrix::Zero(a.rows(), n_ctrg);
  for (Eigen::Index t = 0; t < a.cols(); ++t) {
    const int c = y_trg[static_cast<std::size_t>(t)];
    if (c < 0 || c >= n_ctrg) {
      throw invalid_input_error("transferability A: label out of range");
    }
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      out.tr(i, c) += a(i, t) * a(i, t);
    }
  }
  return out;
}

// Tr(i, j) = (2 pi sigma2)^(-m/2) exp(-||z_i - zbar_j||^2 / (2 sigma2)) with
// z the hidden representations and zbar_j the mean over target training
// samples of class j. Densities are kept in log space alongside the linear
// values; the prefactor underflows in linear space once m is a few hundred.
inline TransferabilityMatrix transferability_scheme_B(
    const AutoencoderParams& p, const Matrix& x_src, const Matrix& x_trg,
    const std::vector<int>& y_trg, double sigma2, int n_ctrg) {
  if (!(sigma2 > 0.0)) throw invalid_input_error("transferability B: sigma2 must be > 0");
  if (static_cast<Eigen::Index>(y_trg.size()) != x_trg.cols()) {
    throw dimension_error("transferability B: labels must cover target samples");
  }
  if (n_ctrg < 1) throw invalid_input_error("transferability B: n_ctrg must be >= 1");

  const Matrix z_src = forward(p, x_src).z;
  const Matrix z_trg = forward(p, x_trg).z;
  const Eigen::Index m = z_src.rows();

  Matrix means = Matrix::Zero(m, n_ctrg);
  std::vector<int> count(static_cast<std::size_t>(n_ctrg), 0);
  for (Eigen::Index t = 0; t < z_trg.cols(); ++t) {
    const int c = y_trg[static_cast<std::size_t>(t)];
    if (c < 0 || c >= n_ctrg) {
      throw invalid_input_error("transferability B: label out of range");
    }
    means.col(c) += z_trg.col(t);
    ++count[static_cast<std::size_t>(c)];
  }
  for (int c = 0; c < n_ctrg; ++c) {
    if (count[static_cast<std::size_t>(c)] == 0) {
      throw invalid_input_error("transferability B: class " + std::to_string(c) +
                                " has no target training samples");
    }
    means.col(c) /= static_cast<double>(count[static_cast<std::size_t>(c)]);
  }

  TransferabilityMatrix out;
  out.scheme = Scheme::B;
  const double log_norm = -0.5 * static_cast<double>(m) *
                          std::log(2.0 * std::numbers::pi_v<double> * sigma2);
  Matrix lt(z_src.cols(), n_ctrg);
  for (Eigen::Index i = 0; i < z_src.cols(); ++i) {
    for (int c = 0; c < n_ctrg; ++c) {
      lt(i, c) = log_norm -
                 (z_src.col(i) - means.col(c)).squaredNorm() / (2.0 * sigma2);
    }
  }
  // std::exp per entry: Eigen's vectorized exp clamps its argument near -709
  // and would report a floor value instead of underflowing to exact zero.
  out.tr = lt.unaryExpr([](double v) { return std::exp(v); });
  out.log_tr = std::move(lt);
  return out;
}

struct PseudoLabelMatrix {
  Matrix p;  // n_src x n_ctrg; one-hot rows (hard) or distributions (soft)
  LabelMode mode = LabelMode::soft;
};

// Hard: one-hot at the per-row argmax, ties to the lowest class index.
// Soft: row-normalized transferability. Scheme B normalizes in log space
// (max subtraction before exponentiation); an all-zero scheme-A row becomes
// the uniform distribution, since normalizing zero is undefined and such
// samples carry zero weight anyway.
inline PseudoLabelMatrix pseudo_labels(const TransferabilityMatrix& tm, LabelMode mode) {
  const Matrix& scores = tm.log_tr ? *tm.log_tr : tm.tr;
  const Eigen::Index n = scores.rows();
  const Eigen::Index c = scores.cols();
  PseudoLabelMatrix out;
  out.mode = mode;
  out.p = Matrix::Zero(n, c);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (mode == LabelMode::hard) {
      Eigen::Index best = 0;
      for (Eigen::Index j = 1; j < c; ++j) {
        if (scores(i, j) > scores(i, best)) best = j;
      }
      out.p(i, best) = 1.0;
      continue;
    }
    if (tm.log_tr) {
      const double mx = scores.row(i).maxCoeff();
      double sum = 0.0;
      for (Eigen::Index j = 0; j < c; ++j) {
        out.p(i, j) = std::exp(scores(i, j) - mx);
        sum += out.p(i, j);
      }
      out.p.row(i) /= sum;
    } else {
      const double sum = tm.tr.row(i).sum();
      if (sum == 0.0) {
        out.p.row(i).setConstant(1.0 / static_cast<double>(c));
      } else {
        out.p.row(i) = tm.tr.row(i) / sum;
      }
    }
  }
  return out;
}

// Indices of the p largest weights, ties broken toward the lower index.
inline std::vector<Eigen::Index> select_top_p(const Vector& wt, Eigen::Index p) {
  if (p < 0 || p > wt.size()) {
    throw invalid_input_error("select_top_p: p must be in [0, n_src], got " +
                              std::to_string(p));
  }
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(wt.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    return wt(a) > wt(b);
  });
  idx.resize(static_cast<std::size_t>(p));
  return idx;
}

}  // namespace gastl
