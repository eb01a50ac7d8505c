// k-nearest-neighbour similarity graph over samples (columns) and its
// unnormalized Laplacian L = diag(d) - S. S keeps only non-negative cosine
// similarities on kNN edges, so L is symmetric positive semidefinite and its
// rows sum to zero.

#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gastl/errors.hpp"
#include "gastl/numerics.hpp"

namespace gastl {

// Cosine similarity between two columns; 0 when either has zero norm.
inline double cosine_similarity(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw dimension_error("cosine_similarity: length mismatch");
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

struct SimilarityGraph {
  Matrix similarity;  // n x n, symmetric, zero diagonal, entries >= 0
  Vector degree;      // row sums of similarity
  Matrix laplacian;   // diag(degree) - similarity
};

// Builds the mutual (OR-symmetrized) kNN graph: samples i and j are linked
// when either one is among the other's k most cosine-similar samples.
// Similarity ties are broken toward the lower column index. Negative cosine
// values are clamped to zero so edge weights stay non-negative.
inline SimilarityGraph build_knn_graph(const Matrix& x, int k) {
  const Eigen::Index n = x.cols();
  if (n < 2) throw invalid_input_error("build_knn_graph: need at least 2 samples");
  if (k < 1 || k > n - 1) {
    throw invalid_input_error("build_knn_graph: k must be in [1, n-1], got " +
                              std::to_string(k));
  }
  require_finite(x, "build_knn_graph: x");

  Matrix cos(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    cos(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double c = cosine_similarity(x.col(i), x.col(j));
      cos(i, j) = c;
      cos(j, i) = c;
    }
  }

  // adjacent(i, j) marks "i is one of j's k nearest neighbours".
  std::vector<std::vector<bool>> adjacent(n, std::vector<bool>(n, false));
  std::vector<Eigen::Index> order;
  for (Eigen::Index j = 0; j < n; ++j) {
    order.resize(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    order.erase(std::remove(order.begin(), order.end(), j), order.end());
    std::partial_sort(order.begin(), order.begin() + k, order.end(),
                      [&](Eigen::Index a, Eigen::Index b) {
                        if (cos(a, j) != cos(b, j)) return cos(a, j) > cos(b, j);
                        return a < b;
                      });
    for (int t = 0; t < k; ++t) adjacent[static_cast<std::size_t>(order[t])][static_cast<std::size_t>(j)] = true;
  }

  SimilarityGraph g;
  g.similarity = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (adjacent[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ||
          adjacent[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]) {
        const double w = std::max(0.0, cos(i, j));
        g.similarity(i, j) = w;
        g.similarity(j, i) = w;
      }
    }
  }
  g.degree = g.similarity.rowwise().sum();
  g.laplacian = Matrix(g.degree.asDiagonal());
  g.laplacian -= g.similarity;
  return g;
}

}  // namespace gastl
