#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include <Eigen/QR>

#include "gastl/errors.hpp"
#include "gastl/l21solver.hpp"
#include "gastl/numerics.hpp"
#include "gastl/random.hpp"
#include "support/oracles.hpp"

using gastl::Matrix;
using gastl::Vector;

namespace {

Matrix sigmoid_like(int d, int n, gastl::Rng& rng) {
  // Values in (0, 1), matching what an encoder hands the solver.
  return testsupport::random_matrix(d, n, rng, 0.05, 0.95);
}

int nonzero_rows(const Matrix& a, double thresh) {
  int count = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    if (a.row(i).norm() > thresh) ++count;
  }
  return count;
}

}  // namespace

TEST(UpdateU, HandCases) {
  Matrix a(3, 2);
  a << 2.0, 0.0,   // norm 2
       0.0, 0.0,   // zero row stays zero, no epsilon floor
       3.0, 4.0;   // norm 5
  const auto u = gastl::update_U(a);
  ASSERT_EQ(u.u.size(), 3);
  EXPECT_NEAR(u.u[0], 1.0 / (2.0 + 1e-8), 1e-18);
  EXPECT_EQ(u.u[1], 0.0);
  EXPECT_NEAR(u.u[2], 1.0 / (5.0 + 1e-8), 1e-18);

  const auto z = gastl::update_U(Matrix::Zero(4, 3));
  EXPECT_TRUE(z.u.isZero(0.0));
}

TEST(SolveA, OrthonormalSourceReducesToProjection) {
  gastl::Rng rng(21);
  const int d = 6, n_trg = 4;
  Matrix raw = testsupport::random_matrix(d, d, rng);
  const Matrix q = Eigen::HouseholderQR<Matrix>(raw).householderQ();
  const Matrix h = sigmoid_like(d, n_trg, rng);
  gastl::ReweightDiagonal u;
  u.u = Vector::Zero(d);
  const Matrix a = gastl::solve_A_given_U(q, h, u, 2.5, 0.0);
  EXPECT_LE((a - q.transpose() * h).norm(), 1e-12);
}

TEST(SolveA, ZeroPenaltyMatchesLeastSquares) {
  gastl::Rng rng(22);
  const int d = 8, n_src = 5, n_trg = 3;
  const Matrix x = testsupport::random_matrix(d, n_src, rng);
  const Matrix h = sigmoid_like(d, n_trg, rng);
  gastl::ReweightDiagonal u;
  u.u = Vector::Zero(n_src);
  const Matrix a = gastl::solve_A_given_U(x, h, u, 1.0, 0.0);
  const Matrix ls = x.colPivHouseholderQr().solve(h);
  EXPECT_LE((a - ls).norm(), 1e-8 * std::max(1.0, ls.norm()));
}

TEST(SolveA, HugePenaltyShrinksTowardZero) {
  gastl::Rng rng(23);
  const int d = 6, n_src = 4, n_trg = 3;
  const Matrix x = testsupport::random_matrix(d, n_src, rng);
  const Matrix h = sigmoid_like(d, n_trg, rng);
  Matrix a0 = testsupport::random_matrix(n_src, n_trg, rng);
  a0.rowwise().normalize();
  const auto u = gastl::update_U(a0);
  const Matrix a = gastl::solve_A_given_U(x, h, u, 1.0, 1e6);
  EXPECT_LE(a.norm(), 1e-3);
}

TEST(SolveA, SatisfiesTheStationarityEquation) {
  gastl::Rng rng(24);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 7, n_src = 5, n_trg = 4;
    const Matrix x = testsupport::random_matrix(d, n_src, rng);
    const Matrix h = sigmoid_like(d, n_trg, rng);
    const auto u = gastl::update_U(testsupport::random_matrix(n_src, n_trg, rng));
    const double mu = 0.7, lambda = 0.05;
    const Matrix a = gastl::solve_A_given_U(x, h, u, mu, lambda);
    const Matrix resid = (mu / n_trg) * (x.transpose() * (x * a) - x.transpose() * h) +
                         lambda * u.u.asDiagonal() * a;
    const double scale = std::max(1.0, ((mu / n_trg) * x.transpose() * h).norm());
    EXPECT_LE(resid.norm(), 1e-8 * scale);
  }
}

TEST(SolveA, WideSingularSystemUsesTheRidgeFallback) {
  gastl::Rng rng(25);
  // More source samples than features: X'X is rank deficient and only the
  // damped retry can factor it when no rows are reweighted.
  const int d = 4, n_src = 9, n_trg = 3;
  const Matrix x = testsupport::random_matrix(d, n_src, rng);
  const Matrix h = sigmoid_like(d, n_trg, rng);
  gastl::ReweightDiagonal u;
  u.u = Vector::Zero(n_src);
  const Matrix a = gastl::solve_A_given_U(x, h, u, 1.0, 0.0);
  EXPECT_TRUE(gastl::all_finite(a));
  // The damped solution still nearly reproduces the attainable fit.
  const Matrix fitted = x * a;
  const Matrix best = x * x.colPivHouseholderQr().solve(h);
  EXPECT_LE((fitted - best).norm(), 1e-3 * std::max(1.0, best.norm()));
}

TEST(SolveA, HopelessSystemRaisesNumericalError) {
  const Matrix x = Matrix::Zero(4, 3);
  const Matrix h = Matrix::Constant(4, 2, 0.5);
  gastl::ReweightDiagonal u;
  u.u = Vector::Zero(3);
  EXPECT_THROW(gastl::solve_A_given_U(x, h, u, 1.0, 0.0), gastl::numerical_error);
}

TEST(F2Value, MatchesPlainLoopEvaluation) {
  gastl::Rng rng(26);
  const int d = 6, n_src = 5, n_trg = 4;
  const Matrix x = testsupport::random_matrix(d, n_src, rng);
  const Matrix h = sigmoid_like(d, n_trg, rng);
  const Matrix a = testsupport::random_matrix(n_src, n_trg, rng);
  const double mu = 1.3, lambda = 0.2;
  EXPECT_NEAR(gastl::f2_value(x, h, a, mu, lambda),
              testsupport::f2_reference(x, h, a, mu, lambda), 1e-12);
}

TEST(Irls, ZeroPenaltyStopsAfterOneIteration) {
  gastl::Rng rng(27);
  const Matrix x = testsupport::random_matrix(6, 4, rng);
  const Matrix h = sigmoid_like(6, 3, rng);
  const auto r = gastl::irls_solve(x, h, 1.0, 0.0);
  ASSERT_EQ(r.history.size(), 2u);
  EXPECT_EQ(r.history[0], r.history[1]);
}

TEST(Irls, ZeroTargetsGiveZeroMapping) {
  gastl::Rng rng(28);
  const Matrix x = testsupport::random_matrix(5, 4, rng);
  const Matrix h = Matrix::Zero(5, 3);
  const auto r = gastl::irls_solve(x, h, 1.0, 0.1);
  EXPECT_TRUE(r.a.isZero(0.0));
  EXPECT_EQ(r.history.front(), 0.0);
}

TEST(Irls, HistoryNeverIncreases) {
  gastl::Rng rng(29);
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 6 + trial % 3;
    const int n_src = 4 + trial % 4;
    const int n_trg = 3 + trial % 2;
    const Matrix x = testsupport::random_matrix(d, n_src, rng);
    const Matrix h = sigmoid_like(d, n_trg, rng);
    const double lambda = std::vector<double>{1e-4, 1e-2, 1.0}[trial % 3];
    const auto r = gastl::irls_solve(x, h, 1.0, lambda, 1e-8, 1e-10, 100);
    for (std::size_t i = 1; i < r.history.size(); ++i) {
      EXPECT_LE(r.history[i], r.history[i - 1] + 1e-10)
          << "trial " << trial << " step " << i;
      ++checked;
    }
  }
  EXPECT_GT(checked, 20);
}

TEST(Irls, AgreesWithProximalGradientOracle) {
  gastl::Rng rng(30);
  const int d = 8, n_src = 6, n_trg = 4;
  const Matrix x = testsupport::random_matrix(d, n_src, rng);
  const Matrix h = sigmoid_like(d, n_trg, rng);
  for (double lambda : {1e-3, 1e-1}) {
    const auto r = gastl::irls_solve(x, h, 1.0, lambda, 1e-8, 1e-12, 200);
    const double f_irls = r.history.back();
    const double f_star = testsupport::f2_prox_gradient_min(x, h, 1.0, lambda);
    EXPECT_LE(std::abs(f_irls - f_star), 1e-4 * std::max(1.0, std::abs(f_star)))
        << "lambda " << lambda;
  }
}

TEST(Irls, StrongerPenaltyNeverAddsRows) {
  gastl::Rng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix x = testsupport::random_matrix(7, 6, rng);
    const Matrix h = sigmoid_like(7, 4, rng);
    const double lambda = 1e-3 * std::pow(10.0, trial % 3);
    const auto weak = gastl::irls_solve(x, h, 1.0, lambda, 1e-8, 1e-12, 200);
    const auto strong = gastl::irls_solve(x, h, 1.0, 100.0 * lambda, 1e-8, 1e-12, 200);
    EXPECT_LE(nonzero_rows(strong.a, 1e-3), nonzero_rows(weak.a, 1e-3))
        << "trial " << trial;
  }
}

TEST(Irls, RejectsBadArguments) {
  gastl::Rng rng(32);
  const Matrix x = testsupport::random_matrix(5, 4, rng);
  const Matrix h = sigmoid_like(5, 3, rng);
  EXPECT_THROW(gastl::irls_solve(x, h, -1.0, 0.1), gastl::invalid_input_error);
  EXPECT_THROW(gastl::irls_solve(x, h, 1.0, -0.1), gastl::invalid_input_error);
  EXPECT_THROW(gastl::irls_solve(x, testsupport::random_matrix(4, 3, rng), 1.0, 0.1),
               gastl::dimension_error);
  EXPECT_THROW(gastl::irls_solve(x, h, 1.0, 0.1, 1e-8, 1e-10, 0),
               gastl::invalid_input_error);
}
