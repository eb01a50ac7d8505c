// Weighted softmax (multinomial logistic) classifier. Training samples carry
// per-sample weights and label rows that are either one-hot or soft
// distributions; the cost averages over the total sample count n even though
// weights already scale each term. No intercept and no weight decay.

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gastl/errors.hpp"
#include "gastl/lbfgs.hpp"
#include "gastl/numerics.hpp"

namespace gastl {

struct WeightedTrainingSet {
  Matrix x;        // d x n
  Matrix labels;   // n x n_ctrg, rows sum to 1
  Vector weights;  // n entries in [0, 1]; target samples carry exactly 1
};

inline void check_training_set(const WeightedTrainingSet& ts) {
  if (ts.x.cols() < 1) throw invalid_input_error("training set: empty");
  if (ts.labels.rows() != ts.x.cols() || ts.weights.size() != ts.x.cols()) {
    throw dimension_error("training set: label/weight counts must match samples");
  }
  if (ts.labels.cols() < 1) throw invalid_input_error("training set: no classes");
  for (Eigen::Index i = 0; i < ts.labels.rows(); ++i) {
    if (std::abs(ts.labels.row(i).sum() - 1.0) > 1e-10) {
      throw invalid_input_error("training set: label row " + std::to_string(i) +
                                " does not sum to 1");
    }
  }
}

struct ClassifierParams {
  Matrix theta;  // d x n_ctrg, one column per class
};

namespace detail {

// Log-softmax rows of the n x n_ctrg logit matrix, max-subtracted per row.
inline Matrix log_softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double mx = logits.row(i).maxCoeff();
    double sum = 0.0;
    for (Eigen::Index j = 0; j < logits.cols(); ++j) {
      sum += std::exp(logits(i, j) - mx);
    }
    const double lse = mx + std::log(sum);
    out.row(i) = logits.row(i).array() - lse;
  }
  return out;
}

}  // namespace detail

// J = -(1/n) sum_i w_i sum_j L(i,j) log softmax_j(theta^T x_i) and its
// gradient, column j = -(1/n) sum_i w_i x_i (L(i,j) - softmax_j).
inline std::pair<double, Matrix> softmax_cost_grad(const ClassifierParams& c,
                                                   const WeightedTrainingSet& ts) {
  if (c.theta.rows() != ts.x.rows() || c.theta.cols() != ts.labels.cols()) {
    throw dimension_error("softmax_cost_grad: theta shape mismatch");
  }
  const Eigen::Index n = ts.x.cols();
  const Matrix logits = (c.theta.transpose() * ts.x).transpose();  // n x n_ctrg
  const Matrix logp = detail::log_softmax_rows(logits);
  const Matrix probs = logp.array().exp().matrix();

  const double inv_n = 1.0 / static_cast<double>(n);
  double j = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    j -= ts.weights(i) * ts.labels.row(i).dot(logp.row(i));
  }
  j *= inv_n;
  const Matrix grad =
      -inv_n * (ts.x * (ts.weights.asDiagonal() * (ts.labels - probs)));
  return {j, grad};
}

// Minimizes J from a zero start. The start point is deterministic, so the
// seed parameter is accepted only for interface symmetry with the other
// trainers and has no effect.
inline ClassifierParams train_softmax(const WeightedTrainingSet& ts,
                                      const LbfgsOptions& opts = {},
                                      std::uint64_t /*seed*/ = 0) {
  check_training_set(ts);
  if (ts.weights.maxCoeff() <= 0.0) {
    throw invalid_input_error("train_softmax: all sample weights are zero");
  }
  const Eigen::Index d = ts.x.rows();
  const Eigen::Index n_ctrg = ts.labels.cols();
  auto objective = [&](const Vector& v, Vector& grad) {
    ClassifierParams c;
    c.theta = Eigen::Map<const Matrix>(v.data(), d, n_ctrg);
    auto [j, g] = softmax_cost_grad(c, ts);
    grad = Eigen::Map<const Vector>(g.data(), g.size());
    return j;
  };
  const LbfgsResult r = minimize(objective, Vector::Zero(d * n_ctrg), opts);
  ClassifierParams c;
  c.theta = Eigen::Map<const Matrix>(r.minimizer.data(), d, n_ctrg);
  return c;
}

struct Prediction {
  std::vector<int> labels;  // argmax class per sample, ties to the lowest index
  Matrix probabilities;     // n_test x n_ctrg, rows sum to 1
};

inline Prediction predict(const ClassifierParams& c, const Matrix& x) {
  if (c.theta.rows() != x.rows()) {
    throw dimension_error("predict: feature dimension mismatch");
  }
  const Matrix logits = (c.theta.transpose() * x).transpose();
  Prediction out;
  out.probabilities = detail::log_softmax_rows(logits).array().exp().matrix();
  out.labels.reserve(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < logits.cols(); ++j) {
      if (logits(i, j) > logits(i, best)) best = j;
    }
    out.labels.push_back(static_cast<int>(best));
  }
  return out;
}

// Fraction of exact label matches.
inline double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size() || truth.empty()) {
    throw dimension_error("accuracy: label vectors must be equal and non-empty");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (predicted[i] == truth[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace gastl
