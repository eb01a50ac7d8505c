#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "gastl/errors.hpp"
#include "gastl/numerics.hpp"
#include "gastl/random.hpp"
#include "support/finite_difference.hpp"
#include "support/oracles.hpp"

using gastl::Matrix;
using gastl::Vector;

TEST(LrpNorm, HandEvaluatedCases) {
  Matrix zero = Matrix::Zero(2, 2);
  EXPECT_EQ(gastl::lrp_norm(zero, 2.0, 1.0), 0.0);

  Matrix w(2, 2);
  w << 3, 4, 0, 0;  // row norms 5 and 0
  EXPECT_DOUBLE_EQ(gastl::lrp_norm(w, 2.0, 1.0), 5.0);

  Matrix eye = Matrix::Identity(2, 2);
  EXPECT_DOUBLE_EQ(gastl::lrp_norm(eye, 2.0, 2.0), std::sqrt(2.0));
}

TEST(LrpNorm, MatchesL21Exactly) {
  gastl::Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const auto rows = 1 + static_cast<Eigen::Index>(rng.below(8));
    const auto cols = 1 + static_cast<Eigen::Index>(rng.below(8));
    const Matrix w = testsupport::random_matrix(rows, cols, rng, -10.0, 10.0);
    EXPECT_EQ(gastl::lrp_norm(w, 2.0, 1.0), gastl::l21_norm(w));
  }
}

TEST(LrpNorm, AbsolutelyHomogeneous) {
  gastl::Rng rng(7);
  const Matrix w = testsupport::random_matrix(5, 4, rng);
  for (double c : {-3.5, 0.25, 11.0}) {
    for (auto [r, p] : {std::pair{2.0, 1.0}, {3.0, 1.5}, {1.0, 2.0}}) {
      const double lhs = gastl::lrp_norm(c * w, r, p);
      const double rhs = std::abs(c) * gastl::lrp_norm(w, r, p);
      EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, rhs));
    }
  }
}

TEST(LrpNorm, RejectsBadInput) {
  Matrix w(1, 2);
  w << 1.0, std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(gastl::lrp_norm(w, 2.0, 1.0), gastl::invalid_input_error);
  EXPECT_THROW(gastl::l21_norm(w), gastl::invalid_input_error);
  Matrix ok = Matrix::Ones(2, 2);
  EXPECT_THROW(gastl::lrp_norm(ok, 0.0, 1.0), gastl::invalid_input_error);
  EXPECT_THROW(gastl::lrp_norm(ok, 2.0, -1.0), gastl::invalid_input_error);
}

TEST(L21Norm, HandEvaluatedCases) {
  Matrix w(2, 2);
  w << 3, 4, 0, 0;
  EXPECT_DOUBLE_EQ(gastl::l21_norm(w), 5.0);
  EXPECT_EQ(gastl::l21_norm(Matrix::Zero(3, 3)), 0.0);
  EXPECT_DOUBLE_EQ(gastl::l21_norm(Matrix::Identity(2, 2)), 2.0);
}

TEST(Sigmoid, PointValuesAndSymmetry) {
  EXPECT_DOUBLE_EQ(gastl::sigmoid(0.0), 0.5);
  EXPECT_LT(1.0 - gastl::sigmoid(50.0), 1e-20);
  EXPECT_DOUBLE_EQ(gastl::sigmoid(1.7) + gastl::sigmoid(-1.7), 1.0);
  // The stable branch must not overflow for very negative arguments.
  EXPECT_EQ(gastl::sigmoid(-1000.0), 0.0);
  EXPECT_GT(gastl::sigmoid(-700.0), 0.0);
}

TEST(Sigmoid, RangeAndDerivative) {
  gastl::Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const double z = rng.uniform(-8.0, 8.0);
    const double s = gastl::sigmoid(z);
    EXPECT_GT(s, 0.0);
    EXPECT_LT(s, 1.0);
    const double h = 1e-6;
    const double fd = (gastl::sigmoid(z + h) - gastl::sigmoid(z - h)) / (2.0 * h);
    EXPECT_NEAR(s * (1.0 - s), fd, 1e-6);
  }
}

TEST(Sigmoid, MatrixFormMatchesScalar) {
  gastl::Rng rng(5);
  const Matrix m = testsupport::random_matrix(3, 4, rng, -6.0, 6.0);
  const Matrix s = gastl::sigmoid(m);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      EXPECT_EQ(s(i, j), gastl::sigmoid(m(i, j)));
    }
  }
}

TEST(Rng, DeterministicPerSeed) {
  gastl::Rng a(123), b(123), c(124);
  bool all_equal = true;
  bool any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform01();
    if (x != b.uniform01()) all_equal = false;
    if (x != c.uniform01()) any_diff = true;
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
  EXPECT_TRUE(all_equal);
  EXPECT_TRUE(any_diff);
}

TEST(Rng, NormalMomentsRoughlyStandard) {
  gastl::Rng rng(99);
  const int n = 20000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = rng.normal();
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 0.05);
  EXPECT_NEAR(var, 1.0, 0.05);
}
