// Limited-memory BFGS with a strong-Wolfe line search (bracket + zoom with
// safeguarded cubic interpolation). Accepted steps satisfy the Armijo
// condition, so the recorded value history never increases; that monotonicity
// is what the outer alternating scheme relies on.

#pragma once

#include <cmath>
#include <deque>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "gastl/errors.hpp"
#include "gastl/numerics.hpp"

namespace gastl {

struct LbfgsOptions {
  int max_iterations = 400;
  int memory = 100;
  double gradient_tolerance = 1e-6;        // on the infinity norm
  double relative_value_tolerance = 1e-9;  // |f_k - f_{k-1}| vs max(1, |f_{k-1}|)
  double c1 = 1e-4;                        // Armijo slope fraction
  double c2 = 0.9;                         // curvature slope fraction
};

enum class TerminationReason {
  gradient_small,
  value_stalled,
  max_iterations,
  line_search_failed,
};

inline const char* to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::gradient_small: return "gradient-small";
    case TerminationReason::value_stalled: return "value-stalled";
    case TerminationReason::max_iterations: return "max-iterations";
    case TerminationReason::line_search_failed: return "line-search-failed";
  }
  return "unknown";
}

struct LbfgsResult {
  Vector minimizer;
  double final_value = 0.0;
  std::vector<double> value_history;  // f(x0), then one entry per accepted step
  TerminationReason reason = TerminationReason::max_iterations;
  int iterations = 0;
};

struct CurvaturePair {
  Vector s;    // x_{k+1} - x_k
  Vector y;    // g_{k+1} - g_k
  double rho;  // 1 / (s^T y), positive for stored pairs
};

// Two-loop recursion over the stored pairs, newest last. The initial Hessian
// is gamma * I with gamma = (s^T y) / (y^T y) of the newest pair. An empty
// history yields steepest descent.
inline Vector two_loop_direction(const Vector& gradient,
                                 const std::deque<CurvaturePair>& history) {
  if (history.empty()) return -gradient;
  const std::size_t h = history.size();
  std::vector<double> alpha(h);
  Vector q = gradient;
  for (std::size_t i = h; i-- > 0;) {
    alpha[i] = history[i].rho * history[i].s.dot(q);
    q -= alpha[i] * history[i].y;
  }
  const CurvaturePair& last = history.back();
  const double gamma = last.s.dot(last.y) / last.y.dot(last.y);
  Vector r = gamma * q;
  for (std::size_t i = 0; i < h; ++i) {
    const double beta = history[i].rho * history[i].y.dot(r);
    r += (alpha[i] - beta) * history[i].s;
  }
  return -r;
}

namespace detail {

// Minimizer of the cubic through (a, fa, da) and (b, fb, db); falls back to
// the midpoint when the interpolant is degenerate or lands outside (a, b).
inline double cubic_step(double a, double fa, double da, double b, double fb, double db) {
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  const double mid = 0.5 * (a + b);
  if (disc < 0.0) return mid;
  const double d2 = std::copysign(std::sqrt(disc), b - a);
  double t = b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2);
  if (!std::isfinite(t)) return mid;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  const double margin = 0.1 * (hi - lo);
  if (t < lo + margin || t > hi - margin) return mid;
  return t;
}

}  // namespace detail

// Minimizes f, which must fill `grad` and return the value at x. The search
// direction comes from two_loop_direction; curvature pairs with
// s^T y <= 1e-10 ||s|| ||y|| are discarded. If the line search cannot find a
// strong-Wolfe point within 50 zoom steps, the best strictly improving trial
// (if any) is taken and the run stops with line_search_failed.
template <class F>
LbfgsResult minimize(F&& f, const Vector& x0, const LbfgsOptions& opts = {}) {
  if (opts.max_iterations < 1) {
    throw invalid_input_error("lbfgs: max_iterations must be >= 1");
  }
  if (opts.memory < 1) throw invalid_input_error("lbfgs: memory must be >= 1");
  if (!(opts.c1 > 0.0 && opts.c1 < opts.c2 && opts.c2 < 1.0)) {
    throw invalid_input_error("lbfgs: need 0 < c1 < c2 < 1");
  }

  LbfgsResult res;
  Vector x = x0;
  Vector g(x.size());
  double fx = f(x, g);
  if (!std::isfinite(fx) || !all_finite(g)) {
    throw invalid_input_error("lbfgs: objective is not finite at the start point");
  }
  res.value_history.push_back(fx);

  std::deque<CurvaturePair> history;
  Vector x_trial(x.size());
  Vector g_trial(x.size());

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    if (g.lpNorm<Eigen::Infinity>() <= opts.gradient_tolerance) {
      res.reason = TerminationReason::gradient_small;
      break;
    }

    Vector d = two_loop_direction(g, history);
    double dg = d.dot(g);
    if (!(dg < 0.0) || !all_finite(d)) {
      history.clear();
      d = -g;
      dg = d.dot(g);
    }

    // phi(t) = f(x + t d); evaluations update x_trial / g_trial.
    auto phi = [&](double t, double& dphi) {
      x_trial = x + t * d;
      const double v = f(x_trial, g_trial);
      dphi = all_finite(g_trial) ? g_trial.dot(d)
                                 : std::numeric_limits<double>::quiet_NaN();
      return v;
    };

    const double phi0 = fx;
    const double dphi0 = dg;
    double best_t = 0.0;
    double best_f = phi0;

    double t_prev = 0.0;
    double f_prev = phi0;
    double g_prev = dphi0;
    double t = (iter == 0) ? std::min(1.0, 1.0 / g.lpNorm<Eigen::Infinity>()) : 1.0;

    double lo = -1.0, f_lo = 0.0, g_lo = 0.0;
    double hi = -1.0, f_hi = 0.0, g_hi = 0.0;
    bool bracketed = false;
    bool accepted = false;
    double t_acc = 0.0, f_acc = 0.0;

    for (int expand = 0; expand < 60; ++expand) {
      double dphi;
      const double ft = phi(t, dphi);
      if (std::isfinite(ft) && ft < best_f) {
        best_f = ft;
        best_t = t;
      }
      if (!std::isfinite(ft) || ft > phi0 + opts.c1 * t * dphi0 ||
          (expand > 0 && ft >= f_prev)) {
        lo = t_prev; f_lo = f_prev; g_lo = g_prev;
        hi = t; f_hi = ft; g_hi = dphi;
        bracketed = true;
        break;
      }
      if (std::abs(dphi) <= -opts.c2 * dphi0) {
        accepted = true;
        t_acc = t;
        f_acc = ft;
        break;
      }
      if (dphi >= 0.0) {
        lo = t; f_lo = ft; g_lo = dphi;
        hi = t_prev; f_hi = f_prev; g_hi = g_prev;
        bracketed = true;
        break;
      }
      t_prev = t; f_prev = ft; g_prev = dphi;
      t *= 2.0;
    }

    if (!accepted && bracketed) {
      for (int z = 0; z < 50; ++z) {
        double tj;
        if (std::isfinite(f_hi) && std::isfinite(g_hi)) {
          tj = detail::cubic_step(lo, f_lo, g_lo, hi, f_hi, g_hi);
        } else {
          tj = 0.5 * (lo + hi);
        }
        double dphi;
        const double ft = phi(tj, dphi);
        if (std::isfinite(ft) && ft < best_f) {
          best_f = ft;
          best_t = tj;
        }
        if (!std::isfinite(ft) || ft > phi0 + opts.c1 * tj * dphi0 || ft >= f_lo) {
          hi = tj; f_hi = ft; g_hi = dphi;
        } else {
          if (std::abs(dphi) <= -opts.c2 * dphi0) {
            accepted = true;
            t_acc = tj;
            f_acc = ft;
            break;
          }
          if (dphi * (hi - lo) >= 0.0) {
            hi = lo; f_hi = f_lo; g_hi = g_lo;
          }
          lo = tj; f_lo = ft; g_lo = dphi;
        }
        if (std::abs(hi - lo) <= 1e-16 * std::max(1.0, std::abs(lo))) break;
      }
    }

    if (!accepted) {
      // No Wolfe point; keep the best strictly improving trial if one exists.
      if (best_t > 0.0 && best_f < fx) {
        double dphi;
        const double ft = phi(best_t, dphi);
        x = x_trial;
        g = g_trial;
        fx = ft;
        res.value_history.push_back(fx);
        res.iterations = iter + 1;
      }
      res.reason = TerminationReason::line_search_failed;
      res.minimizer = x;
      res.final_value = fx;
      return res;
    }

    // phi() left x_trial / g_trial at the accepted step t_acc.
    (void)t_acc;
    const double f_old = fx;
    Vector s = x_trial - x;
    Vector y = g_trial - g;
    x = x_trial;
    g = g_trial;
    fx = f_acc;
    res.value_history.push_back(fx);
    res.iterations = iter + 1;

    const double sy = s.dot(y);
    if (sy > 1e-10 * s.norm() * y.norm()) {
      history.push_back({std::move(s), std::move(y), 1.0 / sy});
      if (static_cast<int>(history.size()) > opts.memory) history.pop_front();
    }

    if (g.lpNorm<Eigen::Infinity>() <= opts.gradient_tolerance) {
      res.reason = TerminationReason::gradient_small;
      break;
    }
    if (std::abs(fx - f_old) <= opts.relative_value_tolerance * std::max(1.0, std::abs(f_old))) {
      res.reason = TerminationReason::value_stalled;
      break;
    }
    if (iter + 1 == opts.max_iterations) {
      res.reason = TerminationReason::max_iterations;
    }
  }

  if (res.iterations == 0 && g.lpNorm<Eigen::Infinity>() <= opts.gradient_tolerance) {
    res.reason = TerminationReason::gradient_small;
  }
  res.minimizer = x;
  res.final_value = fx;
  return res;
}

}  // namespace gastl
