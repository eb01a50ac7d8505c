// Alternating minimization of
//   recon(Theta) + mu * cross(Theta, A) + lambda ||A||_{2,1} + gamma * graph(Theta)
// over the autoencoder parameters Theta (L-BFGS on the smooth part) and the
// transformation matrix A (IRLS closed-form updates). The A-step runs first:
// starting from A = 0 instead would drag h(X_trg) toward 0 during the first
// Theta-step. Each sub-solver is monotone in its own sub-objective, so the
// recorded full-objective trace never increases beyond rounding slack.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gastl/autoencoder.hpp"
#include "gastl/dataset.hpp"
#include "gastl/errors.hpp"
#include "gastl/graph.hpp"
#include "gastl/l21solver.hpp"
#include "gastl/lbfgs.hpp"
#include "gastl/numerics.hpp"

namespace gastl {

struct TransferHyperParams {
  int m = 10;               // hidden layer size
  double mu = 1.0;          // domain-mapping balance
  double lambda = 0.01;     // row-sparsity balance
  double gamma = 0.0;       // local-structure balance
  int k = 5;                // kNN neighbour count
  double epsilon = 1e-8;    // IRLS reweighting constant
  int max_outer = 10;
  double outer_tol = 1e-4;  // relative change of the full objective
  LbfgsOptions lbfgs;
  std::uint64_t seed = 0;
};

inline void check_hyper(const TransferHyperParams& hp) {
  if (hp.m < 1) throw invalid_input_error("hyper: m must be >= 1");
  if (!(hp.mu > 0.0)) throw invalid_input_error("hyper: mu must be > 0");
  if (hp.lambda < 0.0) throw invalid_input_error("hyper: lambda must be >= 0");
  if (hp.gamma < 0.0) throw invalid_input_error("hyper: gamma must be >= 0");
  if (hp.k < 1) throw invalid_input_error("hyper: k must be >= 1");
  if (!(hp.epsilon > 0.0)) throw invalid_input_error("hyper: epsilon must be > 0");
  if (hp.max_outer < 1) throw invalid_input_error("hyper: max_outer must be >= 1");
  if (hp.outer_tol < 0.0) throw invalid_input_error("hyper: outer_tol must be >= 0");
}

struct TransferModel {
  AutoencoderParams params;
  Matrix a;                    // n_src x n_trg
  SimilarityGraph graph;       // over [X_src X_trg]
  std::vector<double> trace;   // full objective after each A-step
  ScalingParams scaler;        // filled by the pipeline, empty after fit()
  TransferHyperParams hyper;
};

// Full objective value; gamma == 0 never touches the graph so the result is
// then independent of its edge weights.
inline double full_objective(const AutoencoderParams& p, const Matrix& a,
                             const DatasetBundle& bundle, const SimilarityGraph& graph,
                             double mu, double lambda, double gamma) {
  Matrix x(bundle.x_src.rows(), bundle.x_src.cols() + bundle.x_trg.cols());
  x << bundle.x_src, bundle.x_trg;
  double v = recon_loss(p, x);
  v += mu * cross_loss(p, a, bundle.x_src, bundle.x_trg);
  v += lambda * l21_norm(a);
  if (gamma > 0.0) v += gamma * graph_loss(p, x, graph.laplacian);
  return v;
}

// Fits the transfer model on an already scaled bundle. Sequence: build the
// kNN graph on [X_src X_trg], initialize Theta from the seed, run one A-step,
// then alternate {Theta-step, A-step} until the objective change falls below
// outer_tol relative or max_outer rounds elapse. The trace records the
// objective after the initial A-step and after each round.
inline TransferModel fit(const DatasetBundle& bundle, const TransferHyperParams& hp) {
  check_hyper(hp);
  validate_bundle(bundle);
  const Eigen::Index d = bundle.dim();
  const Eigen::Index n_src = bundle.n_src();
  const Eigen::Index n_trg = bundle.n_trg();

  TransferModel model;
  model.hyper = hp;
  Matrix x(d, n_src + n_trg);
  x << bundle.x_src, bundle.x_trg;
  model.graph = build_knn_graph(x, hp.k);
  model.params = init_params(static_cast<int>(d), hp.m, hp.seed);

  // The inner IRLS runs well past its module defaults here: each A-step must
  // land close enough to its subproblem optimum that the outer trace cannot
  // tick upward within the recorded slack.
  const double irls_tol = 1e-10;
  const int irls_iter = 200;

  auto a_step = [&](const std::string& where) {
    try {
      const Matrix h = forward(model.params, bundle.x_trg).xhat;
      model.a = irls_solve(bundle.x_src, h, hp.mu, hp.lambda, hp.epsilon,
                           irls_tol, irls_iter).a;
    } catch (const numerical_error& e) {
      throw numerical_error(where + ": " + e.what());
    }
  };

  a_step("fit initial A-step");
  model.trace.push_back(full_objective(model.params, model.a, bundle, model.graph,
                                       hp.mu, hp.lambda, hp.gamma));

  for (int outer = 1; outer <= hp.max_outer; ++outer) {
    const std::string tag = "fit outer iteration " + std::to_string(outer);
    try {
      auto f1 = [&](const Vector& v, Vector& grad) {
        const AutoencoderParams p = unpack_params(v, d, hp.m);
        F1Result r = f1_value_and_gradient(p, model.a, bundle.x_src, bundle.x_trg,
                                           model.graph.laplacian, hp.mu, hp.gamma);
        grad = std::move(r.gradient);
        return r.value;
      };
      const LbfgsResult r = minimize(f1, pack_params(model.params), hp.lbfgs);
      model.params = unpack_params(r.minimizer, d, hp.m);
    } catch (const numerical_error& e) {
      throw numerical_error(tag + ": " + e.what());
    }
    a_step(tag);

    const double prev = model.trace.back();
    const double cur = full_objective(model.params, model.a, bundle, model.graph,
                                      hp.mu, hp.lambda, hp.gamma);
    model.trace.push_back(cur);
    if (std::abs(cur - prev) <= hp.outer_tol * std::max(1.0, std::abs(prev))) break;
  }
  return model;
}

}  // namespace gastl
