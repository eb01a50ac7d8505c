// End-to-end experiment orchestration: scale, fit the transfer model, score
// and select source samples, train the weighted softmax, evaluate on the
// target test split. Also the grid sweep and the gamma ablation built on it.

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "gastl/classifier.hpp"
#include "gastl/dataset.hpp"
#include "gastl/errors.hpp"
#include "gastl/relevance.hpp"
#include "gastl/transfer.hpp"

namespace gastl {

// Number of source samples to keep: an explicit count, every sample ("all"),
// or no transfer at all ("none", the target-only baseline).
struct PChoice {
  enum class Kind { count, all, none };
  Kind kind = Kind::all;
  Eigen::Index count = 0;

  static PChoice parse(const std::string& s) {
    PChoice p;
    if (s == "all") {
      p.kind = Kind::all;
      return p;
    }
    if (s == "none") {
      p.kind = Kind::none;
      return p;
    }
    p.kind = Kind::count;
    std::size_t pos = 0;
    try {
      p.count = static_cast<Eigen::Index>(std::stoll(s, &pos));
    } catch (const std::exception&) {
      pos = std::string::npos;  // also covers the empty string
    }
    if (pos != s.size() || p.count < 0) {
      throw invalid_input_error("p must be a non-negative count, 'all', or 'none', got '" + s + "'");
    }
    return p;
  }

  std::string str() const {
    switch (kind) {
      case Kind::all: return "all";
      case Kind::none: return "none";
      case Kind::count: return std::to_string(count);
    }
    return "?";
  }

  // Ordering key for deterministic tie-breaking: none < any count < all.
  double order_key(Eigen::Index n_src) const {
    switch (kind) {
      case Kind::none: return -1.0;
      case Kind::count: return static_cast<double>(count);
      case Kind::all: return static_cast<double>(n_src);
    }
    return 0.0;
  }
};

struct SyntheticSpec {
  int d = 10;
  int clusters = 3;
  int n_src_per_cluster = 30;
  int n_trg_per_class = 15;
  int relevant_clusters = 2;
  double noise_sd = 0.08;
};

struct DataFiles {
  std::string source;
  std::string target_train;
  std::string target_test;
  std::string label_column;  // empty: last column of the target files
};

struct ExperimentConfig {
  std::optional<DataFiles> files;     // exactly one origin must be set
  std::optional<SyntheticSpec> synth;
  TransferHyperParams hyper;
  PChoice p;
  Scheme scheme = Scheme::A;
  LabelMode mode = LabelMode::soft;
  double sigma2 = 1.0;                // scheme B density variance
  std::uint64_t seed = 0;
  std::string out_path;
};

struct WtSummary {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  Eigen::Index nonzero = 0;
};

struct ExperimentReport {
  double test_accuracy = 0.0;              // correct / total, exactly
  std::vector<double> per_class_accuracy;  // classes without test samples report 0
  std::vector<Eigen::Index> selected;      // source indices, selection order
  WtSummary wt;
  std::vector<double> objective_trace;
  bool target_only = false;   // trained without any transfer
  bool wt_fallback = false;   // p > 0 but every source weight was zero
  ExperimentConfig config;    // resolved echo
  double seconds = 0.0;       // wall clock, excluded from determinism checks
};

inline DatasetBundle load_bundle(const DataFiles& f) {
  // Headerless target files take their last column as labels whatever the
  // name; files with a '#' header must name the label column.
  const std::optional<std::string> label(f.label_column);
  const auto src = load_csv_matrix(f.source);
  const auto trn = load_csv_matrix(f.target_train, label);
  const auto tst = load_csv_matrix(f.target_test, label);

  DatasetBundle b;
  b.x_src = src.data;
  b.x_trg = trn.data;
  b.y_trg = *trn.labels;
  b.x_test = tst.data;
  b.y_test = *tst.labels;
  int top = -1;
  for (int y : b.y_trg) top = std::max(top, y);
  b.n_ctrg = top + 1;
  validate_bundle(b);
  return b;
}

inline DatasetBundle resolve_bundle(const ExperimentConfig& cfg) {
  if (cfg.files.has_value() == cfg.synth.has_value()) {
    throw invalid_input_error("config: exactly one data origin (files or synthetic) required");
  }
  if (cfg.files) return load_bundle(*cfg.files);
  const SyntheticSpec& s = *cfg.synth;
  return make_synthetic_transfer(s.d, s.clusters, s.n_src_per_cluster,
                                 s.n_trg_per_class, s.relevant_clusters,
                                 s.noise_sd, cfg.seed).bundle;
}

namespace detail {

inline Matrix one_hot_rows(const std::vector<int>& y, int n_ctrg) {
  Matrix rows = Matrix::Zero(static_cast<Eigen::Index>(y.size()), n_ctrg);
  for (std::size_t i = 0; i < y.size(); ++i) {
    rows(static_cast<Eigen::Index>(i), y[i]) = 1.0;
  }
  return rows;
}

// Target-only training set: scaled target training samples, one-hot labels,
// unit weights. The "none" baseline and the all-zero-Wt fallback both land here.
inline WeightedTrainingSet target_only_set(const DatasetBundle& scaled) {
  WeightedTrainingSet ts;
  ts.x = scaled.x_trg;
  ts.labels = one_hot_rows(scaled.y_trg, scaled.n_ctrg);
  ts.weights = Vector::Ones(scaled.x_trg.cols());
  return ts;
}

inline void finish_report(ExperimentReport& rep, const ClassifierParams& clf,
                          const DatasetBundle& scaled) {
  const Prediction pred = predict(clf, scaled.x_test);
  rep.test_accuracy = accuracy(pred.labels, scaled.y_test);
  rep.per_class_accuracy.assign(static_cast<std::size_t>(scaled.n_ctrg), 0.0);
  std::vector<int> totals(static_cast<std::size_t>(scaled.n_ctrg), 0);
  std::vector<int> hits(static_cast<std::size_t>(scaled.n_ctrg), 0);
  for (std::size_t i = 0; i < scaled.y_test.size(); ++i) {
    const auto c = static_cast<std::size_t>(scaled.y_test[i]);
    ++totals[c];
    if (pred.labels[i] == scaled.y_test[i]) ++hits[c];
  }
  for (std::size_t c = 0; c < totals.size(); ++c) {
    if (totals[c] > 0) {
      rep.per_class_accuracy[c] = static_cast<double>(hits[c]) / static_cast<double>(totals[c]);
    }
  }
}

}  // namespace detail

// Runs one experiment on an already loaded (unscaled) bundle.
inline ExperimentReport run_experiment(const DatasetBundle& raw, const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_bundle(raw);

  ExperimentReport rep;
  rep.config = cfg;
  ScalingParams scaler;
  const DatasetBundle scaled = scale_bundle(raw, &scaler);

  TransferHyperParams hyper = cfg.hyper;
  hyper.seed = cfg.seed;

  if (cfg.p.kind == PChoice::Kind::none) {
    rep.target_only = true;
    const ClassifierParams clf = train_softmax(detail::target_only_set(scaled),
                                               hyper.lbfgs, cfg.seed);
    detail::finish_report(rep, clf, scaled);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
  }

  TransferModel model = fit(scaled, hyper);
  model.scaler = scaler;
  rep.objective_trace = model.trace;

  const Vector wt = source_weights(model.a);
  rep.wt.min = wt.minCoeff();
  rep.wt.max = wt.maxCoeff();
  rep.wt.mean = wt.mean();
  rep.wt.nonzero = (wt.array() > 0.0).count();

  const Eigen::Index n_src = scaled.n_src();
  const Eigen::Index p_count =
      cfg.p.kind == PChoice::Kind::all ? n_src : cfg.p.count;

  if (rep.wt.max == 0.0 && p_count > 0) {
    // Every source row of A collapsed; transferring weight-0 samples would be
    // a no-op, so fall back to the target-only baseline and say so.
    rep.wt_fallback = true;
    rep.target_only = true;
    const ClassifierParams clf = train_softmax(detail::target_only_set(scaled),
                                               hyper.lbfgs, cfg.seed);
    detail::finish_report(rep, clf, scaled);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
  }

  const TransferabilityMatrix tr =
      cfg.scheme == Scheme::A
          ? transferability_scheme_A(model.a, scaled.y_trg, scaled.n_ctrg)
          : transferability_scheme_B(model.params, scaled.x_src, scaled.x_trg,
                                     scaled.y_trg, cfg.sigma2, scaled.n_ctrg);
  const PseudoLabelMatrix pl = pseudo_labels(tr, cfg.mode);
  rep.selected = select_top_p(wt, p_count);

  const Eigen::Index n_sel = static_cast<Eigen::Index>(rep.selected.size());
  const Eigen::Index n_trg = scaled.n_trg();
  WeightedTrainingSet ts;
  ts.x = Matrix(scaled.dim(), n_sel + n_trg);
  ts.labels = Matrix(n_sel + n_trg, scaled.n_ctrg);
  ts.weights = Vector(n_sel + n_trg);
  for (Eigen::Index i = 0; i < n_sel; ++i) {
    const Eigen::Index s = rep.selected[static_cast<std::size_t>(i)];
    ts.x.col(i) = scaled.x_src.col(s);
    ts.labels.row(i) = pl.p.row(s);
    ts.weights(i) = wt(s);
  }
  ts.x.rightCols(n_trg) = scaled.x_trg;
  ts.labels.bottomRows(n_trg) = detail::one_hot_rows(scaled.y_trg, scaled.n_ctrg);
  ts.weights.tail(n_trg).setOnes();

  const ClassifierParams clf = train_softmax(ts, hyper.lbfgs, cfg.seed);
  detail::finish_report(rep, clf, scaled);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

// Loads or synthesizes the data, then runs.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  return run_experiment(resolve_bundle(cfg), cfg);
}

struct GridSpec {
  std::vector<int> m_values;
  std::vector<double> lambda_values;
  std::vector<double> gamma_values;
  std::vector<PChoice> p_values;
};

// The sweep schedule for p when none is given: 10..100 by 10, 150..500 by 50,
// 1000, 1500, then n_src itself; values beyond n_src are dropped.
inline std::vector<PChoice> default_p_schedule(Eigen::Index n_src) {
  std::vector<Eigen::Index> counts;
  for (Eigen::Index v = 10; v <= 100; v += 10) counts.push_back(v);
  for (Eigen::Index v = 150; v <= 500; v += 50) counts.push_back(v);
  counts.push_back(1000);
  counts.push_back(1500);
  std::vector<PChoice> out;
  for (Eigen::Index v : counts) {
    if (v < n_src) {
      PChoice p;
      p.kind = PChoice::Kind::count;
      p.count = v;
      out.push_back(p);
    }
  }
  PChoice all;
  all.kind = PChoice::Kind::all;
  out.push_back(all);
  return out;
}

struct GridCell {
  int m = 0;
  double lambda = 0.0;
  double gamma = 0.0;
  PChoice p;
  std::string status;  // "ok" or the error message
  std::optional<ExperimentReport> report;
  double seconds = 0.0;
};

struct GridResult {
  std::vector<GridCell> table;  // row count = product of the list lengths
  std::size_t best_index = 0;   // into table; only "ok" cells are eligible
};

// Runs every (m, lambda, gamma, p) cell on the same data. Cell seeds derive
// from the base seed by cell index. Selection is by test accuracy (the tuning
// protocol reports on the same metric, so this is not a generalization
// estimate); ties go to the lexicographically smallest (m, lambda, gamma, p).
inline GridResult grid_search(const ExperimentConfig& base, const GridSpec& spec) {
  if (spec.m_values.empty() || spec.lambda_values.empty() ||
      spec.gamma_values.empty() || spec.p_values.empty()) {
    throw invalid_input_error("grid: every value list must be non-empty");
  }
  const DatasetBundle raw = resolve_bundle(base);
  const Eigen::Index n_src = raw.n_src();

  GridResult res;
  std::uint64_t cell_index = 0;
  for (int m : spec.m_values) {
    for (double lambda : spec.lambda_values) {
      for (double gamma : spec.gamma_values) {
        for (const PChoice& p : spec.p_values) {
          GridCell cell;
          cell.m = m;
          cell.lambda = lambda;
          cell.gamma = gamma;
          cell.p = p;
          ExperimentConfig cfg = base;
          cfg.hyper.m = m;
          cfg.hyper.lambda = lambda;
          cfg.hyper.gamma = gamma;
          cfg.p = p;
          cfg.seed = base.seed + cell_index;
          const auto t0 = std::chrono::steady_clock::now();
          try {
            cell.report = run_experiment(raw, cfg);
            cell.status = "ok";
          } catch (const std::exception& e) {
            cell.status = e.what();
          }
          cell.seconds =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          res.table.push_back(std::move(cell));
          ++cell_index;
        }
      }
    }
  }

  auto key = [&](const GridCell& c) {
    return std::make_tuple(c.m, c.lambda, c.gamma, c.p.order_key(n_src));
  };
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < res.table.size(); ++i) {
    const GridCell& c = res.table[i];
    if (!c.report) continue;
    if (!best) {
      best = i;
      continue;
    }
    const GridCell& b = res.table[*best];
    const double acc_c = c.report->test_accuracy;
    const double acc_b = b.report->test_accuracy;
    if (acc_c > acc_b || (acc_c == acc_b && key(c) < key(b))) best = i;
  }
  if (!best) throw numerical_error("grid: every cell failed");
  res.best_index = *best;
  return res;
}

struct AblationResult {
  ExperimentReport zero_gamma;   // best cell restricted to gamma = 0
  ExperimentReport best_gamma;   // best cell over the full gamma list
  double gamma_zero = 0.0;
  double gamma_best = 0.0;
  double accuracy_delta = 0.0;   // best - zero, never negative
};

// Compares the best gamma = 0 cell against the best cell over the whole
// gamma list (which must contain 0, so the delta cannot be negative).
inline AblationResult gamma_ablation(const ExperimentConfig& base,
                                     const std::vector<double>& gamma_values) {
  if (std::find(gamma_values.begin(), gamma_values.end(), 0.0) == gamma_values.end()) {
    throw invalid_input_error("gamma ablation: the gamma list must include 0");
  }
  GridSpec spec;
  spec.m_values = {base.hyper.m};
  spec.lambda_values = {base.hyper.lambda};
  spec.gamma_values = gamma_values;
  spec.p_values = {base.p};
  const GridResult grid = grid_search(base, spec);

  std::optional<std::size_t> zero;
  for (std::size_t i = 0; i < grid.table.size(); ++i) {
    const GridCell& c = grid.table[i];
    if (!c.report || c.gamma != 0.0) continue;
    if (!zero || c.report->test_accuracy > grid.table[*zero].report->test_accuracy) {
      zero = i;
    }
  }
  if (!zero) throw numerical_error("gamma ablation: the gamma = 0 cell failed");

  AblationResult out;
  out.zero_gamma = *grid.table[*zero].report;
  out.best_gamma = *grid.table[grid.best_index].report;
  out.gamma_zero = 0.0;
  out.gamma_best = grid.table[grid.best_index].gamma;
  out.accuracy_delta = out.best_gamma.test_accuracy - out.zero_gamma.test_accuracy;
  return out;
}

}  // namespace gastl
