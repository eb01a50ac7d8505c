// Single-layer sigmoid autoencoder shared by source and target samples:
// the reconstruction, domain-mapping, and local-structure loss terms plus the
// analytic gradient of their weighted sum with respect to the network
// parameters. The transformation matrix A (n_src x n_trg) is a constant here.
//
// The domain-mapping gradient's W1 block uses X_trg^T as the trailing factor:
// the hidden layer consumes X_trg, so the chain rule leaves X_trg^T. The
// alternative trailing factor (X_src A)^T fails finite-difference checks.

#pragma once

#include <string>

#include <Eigen/Dense>

#include "gastl/errors.hpp"
#include "gastl/numerics.hpp"
#include "gastl/random.hpp"

namespace gastl {

struct AutoencoderParams {
  Matrix w1;  // m x d
  Vector b1;  // m
  Matrix w2;  // d x m
  Vector b2;  // d

  Eigen::Index dim() const { return w1.cols(); }
  Eigen::Index hidden() const { return w1.rows(); }
};

inline void check_params(const AutoencoderParams& p) {
  if (p.w1.rows() < 1 || p.w1.cols() < 1) {
    throw dimension_error("autoencoder: empty weight matrix");
  }
  if (p.w2.rows() != p.w1.cols() || p.w2.cols() != p.w1.rows() ||
      p.b1.size() != p.w1.rows() || p.b2.size() != p.w2.rows()) {
    throw dimension_error("autoencoder: parameter shapes inconsistent");
  }
}

// Weights uniform in [-r, r] with r = sqrt(6 / (d + m)) so pre-activations
// start unsaturated; biases zero. Deterministic per seed.
inline AutoencoderParams init_params(int d, int m, std::uint64_t seed) {
  if (d < 1 || m < 1) throw invalid_input_error("init_params: d, m must be >= 1");
  Rng rng(seed);
  const double r = std::sqrt(6.0 / (d + m));
  AutoencoderParams p;
  p.w1 = Matrix(m, d);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < d; ++j) p.w1(i, j) = rng.uniform(-r, r);
  }
  p.w2 = Matrix(d, m);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < m; ++j) p.w2(i, j) = rng.uniform(-r, r);
  }
  p.b1 = Vector::Zero(m);
  p.b2 = Vector::Zero(d);
  return p;
}

// Flattening order: W1 row-major, W2 row-major, b1, b2.
inline Eigen::Index param_count(Eigen::Index d, Eigen::Index m) {
  return 2 * m * d + m + d;
}

inline Vector pack_params(const AutoencoderParams& p) {
  const Eigen::Index d = p.dim();
  const Eigen::Index m = p.hidden();
  Vector v(param_count(d, m));
  Eigen::Index t = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) v(t++) = p.w1(i, j);
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) v(t++) = p.w2(i, j);
  }
  for (Eigen::Index i = 0; i < m; ++i) v(t++) = p.b1(i);
  for (Eigen::Index i = 0; i < d; ++i) v(t++) = p.b2(i);
  return v;
}

inline AutoencoderParams unpack_params(const Vector& v, Eigen::Index d, Eigen::Index m) {
  if (v.size() != param_count(d, m)) {
    throw dimension_error("unpack_params: vector length does not match (d, m)");
  }
  AutoencoderParams p;
  p.w1 = Matrix(m, d);
  p.w2 = Matrix(d, m);
  p.b1 = Vector(m);
  p.b2 = Vector(d);
  Eigen::Index t = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) p.w1(i, j) = v(t++);
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) p.w2(i, j) = v(t++);
  }
  for (Eigen::Index i = 0; i < m; ++i) p.b1(i) = v(t++);
  for (Eigen::Index i = 0; i < d; ++i) p.b2(i) = v(t++);
  return p;
}

struct ForwardCache {
  Matrix z;     // m x n hidden activations sigmoid(W1 X + b1)
  Matrix xhat;  // d x n outputs sigmoid(W2 Z + b2)
};

inline ForwardCache forward(const AutoencoderParams& p, const Matrix& x) {
  check_params(p);
  if (x.rows() != p.dim()) {
    throw dimension_error("forward: input dimension does not match W1");
  }
  ForwardCache c;
  c.z = sigmoid((p.w1 * x).colwise() + p.b1);
  c.xhat = sigmoid((p.w2 * c.z).colwise() + p.b2);
  return c;
}

// (1 / 2n) ||X - h(X)||_F^2
inline double recon_loss(const AutoencoderParams& p, const Matrix& x) {
  const ForwardCache c = forward(p, x);
  return (x - c.xhat).squaredNorm() / (2.0 * static_cast<double>(x.cols()));
}

// (1 / 2 n_trg) ||X_src A - h(X_trg)||_F^2
inline double cross_loss(const AutoencoderParams& p, const Matrix& a,
                         const Matrix& x_src, const Matrix& x_trg) {
  if (a.rows() != x_src.cols() || a.cols() != x_trg.cols()) {
    throw dimension_error("cross_loss: A must be n_src x n_trg");
  }
  if (x_src.rows() != x_trg.rows()) {
    throw dimension_error("cross_loss: source/target dimensions disagree");
  }
  const ForwardCache c = forward(p, x_trg);
  return (x_src * a - c.xhat).squaredNorm() /
         (2.0 * static_cast<double>(x_trg.cols()));
}

// Tr(Z L Z^T) with Z the hidden activations of X; L must come from the graph
// over the same sample columns.
inline double graph_loss(const AutoencoderParams& p, const Matrix& x, const Matrix& l) {
  if (l.rows() != x.cols() || l.cols() != x.cols()) {
    throw dimension_error("graph_loss: Laplacian must be n x n");
  }
  const ForwardCache c = forward(p, x);
  return (c.z * l).cwiseProduct(c.z).sum();
}

struct F1Result {
  double value = 0.0;
  Vector gradient;  // packed in the documented flattening order
};

namespace detail {

inline void check_grad_block(const Matrix& g, const char* block) {
  if (!all_finite(g)) {
    throw numerical_error(std::string("f1 gradient: non-finite values in ") + block);
  }
}

}  // namespace detail

// Value and gradient of F1(Theta) = recon + mu * cross + gamma * graph, with
// the reconstruction and graph terms taken over the concatenation
// X = [X_src X_trg] and L sized (n_src + n_trg) square. gamma == 0 skips the
// graph term entirely, so the result is then independent of L's values.
inline F1Result f1_value_and_gradient(const AutoencoderParams& p, const Matrix& a,
                                      const Matrix& x_src, const Matrix& x_trg,
                                      const Matrix& l, double mu, double gamma) {
  check_params(p);
  if (mu < 0.0 || gamma < 0.0) {
    throw invalid_input_error("f1_value_and_gradient: mu, gamma must be >= 0");
  }
  if (x_src.rows() != x_trg.rows() || x_src.rows() != p.dim()) {
    throw dimension_error("f1_value_and_gradient: feature dimensions disagree");
  }
  if (a.rows() != x_src.cols() || a.cols() != x_trg.cols()) {
    throw dimension_error("f1_value_and_gradient: A must be n_src x n_trg");
  }
  const Eigen::Index n_src = x_src.cols();
  const Eigen::Index n_trg = x_trg.cols();
  const Eigen::Index n = n_src + n_trg;
  if (gamma > 0.0 && (l.rows() != n || l.cols() != n)) {
    throw dimension_error("f1_value_and_gradient: Laplacian must be (n_src + n_trg) square");
  }

  Matrix x(p.dim(), n);
  x << x_src, x_trg;
  const ForwardCache c = forward(p, x);
  if (!all_finite(c.z) || !all_finite(c.xhat)) {
    throw numerical_error("f1 gradient: non-finite forward activations");
  }
  const auto z_trg = c.z.rightCols(n_trg);
  const auto h_trg = c.xhat.rightCols(n_trg);

  F1Result out;

  // Reconstruction term over all n columns.
  const Matrix dl3 = (c.xhat - x).cwiseProduct(c.xhat).cwiseProduct(
      (1.0 - c.xhat.array()).matrix());
  const Matrix dl2 = (p.w2.transpose() * dl3)
                         .cwiseProduct(c.z)
                         .cwiseProduct((1.0 - c.z.array()).matrix());
  const double inv_n = 1.0 / static_cast<double>(n);
  out.value = (x - c.xhat).squaredNorm() * 0.5 * inv_n;
  Matrix gw1 = inv_n * (dl2 * x.transpose());
  Matrix gw2 = inv_n * (dl3 * c.z.transpose());
  Vector gb1 = inv_n * dl2.rowwise().sum();
  Vector gb2 = inv_n * dl3.rowwise().sum();
  detail::check_grad_block(gw1, "reconstruction block");

  // Domain-mapping term over the target columns.
  if (mu > 0.0) {
    const Matrix resid = h_trg - x_src * a;
    const Matrix dc3 = resid.cwiseProduct(h_trg).cwiseProduct(
        (1.0 - h_trg.array()).matrix());
    const Matrix dc2 = (p.w2.transpose() * dc3)
                           .cwiseProduct(z_trg)
                           .cwiseProduct((1.0 - z_trg.array()).matrix());
    const double s = mu / static_cast<double>(n_trg);
    out.value += resid.squaredNorm() * 0.5 * mu / static_cast<double>(n_trg);
    gw1 += s * (dc2 * x_trg.transpose());
    gw2 += s * (dc3 * z_trg.transpose());
    gb1 += s * dc2.rowwise().sum();
    gb2 += s * dc3.rowwise().sum();
    detail::check_grad_block(gw1, "domain-mapping block");
  }

  // Local-structure term over all n columns; touches only W1 and b1.
  if (gamma > 0.0) {
    const Matrix zl = c.z * l;
    out.value += gamma * zl.cwiseProduct(c.z).sum();
    const Matrix dg = (2.0 * gamma) * zl.cwiseProduct(c.z).cwiseProduct(
        (1.0 - c.z.array()).matrix());
    gw1 += dg * x.transpose();
    gb1 += dg.rowwise().sum();
    detail::check_grad_block(gw1, "local-structure block");
  }

  AutoencoderParams g;
  g.w1 = std::move(gw1);
  g.w2 = std::move(gw2);
  g.b1 = std::move(gb1);
  g.b2 = std::move(gb2);
  out.gradient = pack_params(g);
  if (!std::isfinite(out.value)) {
    throw numerical_error("f1 gradient: non-finite objective value");
  }
  return out;
}

}  // namespace gastl
