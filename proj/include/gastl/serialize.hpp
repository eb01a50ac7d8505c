// JSON and CSV output. Uses ordered JSON objects and lossless double
// round-tripping (shortest representation that parses back to the same bits),
// so identical in-memory values always serialize to identical bytes.

#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "gastl/classifier.hpp"
#include "gastl/pipeline.hpp"
#include "gastl/transfer.hpp"

namespace gastl {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline ordered_json matrix_json(const Matrix& m) {
  ordered_json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(i, c));
  }
  j["data"] = data;  // row-major
  return j;
}

inline Matrix matrix_from_json(const ordered_json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw parse_error("matrix json: data length does not match shape");
  }
  Matrix m(rows, cols);
  std::size_t t = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = data[t++];
  }
  return m;
}

inline std::vector<double> vector_std(const Vector& v) {
  return {v.data(), v.data() + v.size()};
}

inline Vector vector_from_json(const ordered_json& j) {
  const auto data = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(data.data(), static_cast<Eigen::Index>(data.size()));
}

}  // namespace detail

inline ordered_json hyper_to_json(const TransferHyperParams& hp) {
  ordered_json j;
  j["hidden_size"] = hp.m;
  j["mu"] = hp.mu;
  j["lambda"] = hp.lambda;
  j["gamma"] = hp.gamma;
  j["knn"] = hp.k;
  j["epsilon"] = hp.epsilon;
  j["max_outer"] = hp.max_outer;
  j["outer_tol"] = hp.outer_tol;
  j["lbfgs_iterations"] = hp.lbfgs.max_iterations;
  j["lbfgs_memory"] = hp.lbfgs.memory;
  j["seed"] = hp.seed;
  return j;
}

inline TransferHyperParams hyper_from_json(const ordered_json& j) {
  TransferHyperParams hp;
  hp.m = j.at("hidden_size").get<int>();
  hp.mu = j.at("mu").get<double>();
  hp.lambda = j.at("lambda").get<double>();
  hp.gamma = j.at("gamma").get<double>();
  hp.k = j.at("knn").get<int>();
  hp.epsilon = j.at("epsilon").get<double>();
  hp.max_outer = j.at("max_outer").get<int>();
  hp.outer_tol = j.at("outer_tol").get<double>();
  hp.lbfgs.max_iterations = j.at("lbfgs_iterations").get<int>();
  hp.lbfgs.memory = j.at("lbfgs_memory").get<int>();
  hp.seed = j.at("seed").get<std::uint64_t>();
  return hp;
}

inline ordered_json model_to_json(const TransferModel& m) {
  ordered_json j;
  j["w1"] = detail::matrix_json(m.params.w1);
  j["b1"] = detail::vector_std(m.params.b1);
  j["w2"] = detail::matrix_json(m.params.w2);
  j["b2"] = detail::vector_std(m.params.b2);
  j["a"] = detail::matrix_json(m.a);
  j["objective_trace"] = m.trace;
  j["scaler"]["feature_min"] = detail::vector_std(m.scaler.feature_min);
  j["scaler"]["feature_range"] = detail::vector_std(m.scaler.feature_range);
  j["hyper"] = hyper_to_json(m.hyper);
  return j;
}

// Inverse of model_to_json; the graph is not serialized and comes back empty.
inline TransferModel model_from_json(const ordered_json& j) {
  TransferModel m;
  m.params.w1 = detail::matrix_from_json(j.at("w1"));
  m.params.b1 = detail::vector_from_json(j.at("b1"));
  m.params.w2 = detail::matrix_from_json(j.at("w2"));
  m.params.b2 = detail::vector_from_json(j.at("b2"));
  m.a = detail::matrix_from_json(j.at("a"));
  m.trace = j.at("objective_trace").get<std::vector<double>>();
  m.scaler.feature_min = detail::vector_from_json(j.at("scaler").at("feature_min"));
  m.scaler.feature_range = detail::vector_from_json(j.at("scaler").at("feature_range"));
  m.hyper = hyper_from_json(j.at("hyper"));
  check_params(m.params);
  return m;
}

inline ordered_json classifier_to_json(const ClassifierParams& c) {
  ordered_json j;
  j["theta"] = detail::matrix_json(c.theta);
  return j;
}

inline ClassifierParams classifier_from_json(const ordered_json& j) {
  ClassifierParams c;
  c.theta = detail::matrix_from_json(j.at("theta"));
  return c;
}

inline ordered_json config_to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  if (cfg.files) {
    j["origin"]["files"]["source"] = cfg.files->source;
    j["origin"]["files"]["target_train"] = cfg.files->target_train;
    j["origin"]["files"]["target_test"] = cfg.files->target_test;
    j["origin"]["files"]["label_column"] = cfg.files->label_column;
  } else if (cfg.synth) {
    j["origin"]["synthetic"]["d"] = cfg.synth->d;
    j["origin"]["synthetic"]["clusters"] = cfg.synth->clusters;
    j["origin"]["synthetic"]["n_src_per_cluster"] = cfg.synth->n_src_per_cluster;
    j["origin"]["synthetic"]["n_trg_per_class"] = cfg.synth->n_trg_per_class;
    j["origin"]["synthetic"]["relevant_clusters"] = cfg.synth->relevant_clusters;
    j["origin"]["synthetic"]["noise_sd"] = cfg.synth->noise_sd;
  } else {
    j["origin"] = "memory";
  }
  j["hyper"] = hyper_to_json(cfg.hyper);
  j["p"] = cfg.p.str();
  j["scheme"] = cfg.scheme == Scheme::A ? "A" : "B";
  j["mode"] = cfg.mode == LabelMode::soft ? "soft" : "hard";
  j["sigma2"] = cfg.sigma2;
  j["seed"] = cfg.seed;
  return j;
}

inline ordered_json report_to_json(const ExperimentReport& rep) {
  ordered_json j;
  j["test_accuracy"] = rep.test_accuracy;
  j["per_class_accuracy"] = rep.per_class_accuracy;
  std::vector<long long> sel(rep.selected.begin(), rep.selected.end());
  j["selected_source_indices"] = sel;
  j["wt_summary"]["min"] = rep.wt.min;
  j["wt_summary"]["max"] = rep.wt.max;
  j["wt_summary"]["mean"] = rep.wt.mean;
  j["wt_summary"]["nonzero"] = rep.wt.nonzero;
  j["objective_trace"] = rep.objective_trace;
  j["target_only"] = rep.target_only;
  j["wt_fallback"] = rep.wt_fallback;
  j["config"] = config_to_json(rep.config);
  j["wall_clock_seconds"] = rep.seconds;
  return j;
}

namespace detail {

inline std::string csv_safe(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

// One row per grid cell; failed cells leave the accuracy field empty.
inline std::string grid_to_csv(const GridResult& grid, const ExperimentConfig& base) {
  std::string out = "m,lambda,gamma,p,scheme,mode,accuracy,seconds,status\n";
  const std::string scheme = base.scheme == Scheme::A ? "A" : "B";
  const std::string mode = base.mode == LabelMode::soft ? "soft" : "hard";
  for (const GridCell& c : grid.table) {
    out += std::to_string(c.m) + ',' + detail::g17(c.lambda) + ',' +
           detail::g17(c.gamma) + ',' + c.p.str() + ',' + scheme + ',' + mode + ',';
    if (c.report) out += detail::g17(c.report->test_accuracy);
    out += ',' + detail::g17(c.seconds) + ',' + detail::csv_safe(c.status) + '\n';
  }
  return out;
}

inline ordered_json grid_to_json(const GridResult& grid) {
  ordered_json j;
  j["best_index"] = grid.best_index;
  j["best"] = report_to_json(*grid.table[grid.best_index].report);
  j["cells"] = ordered_json::array();
  for (const GridCell& c : grid.table) {
    ordered_json cell;
    cell["m"] = c.m;
    cell["lambda"] = c.lambda;
    cell["gamma"] = c.gamma;
    cell["p"] = c.p.str();
    cell["status"] = c.status;
    if (c.report) cell["accuracy"] = c.report->test_accuracy;
    cell["seconds"] = c.seconds;
    j["cells"].push_back(cell);
  }
  return j;
}

inline ordered_json ablation_to_json(const AblationResult& ab) {
  ordered_json j;
  j["gamma_zero"] = ab.gamma_zero;
  j["gamma_best"] = ab.gamma_best;
  j["accuracy_delta"] = ab.accuracy_delta;
  j["zero_report"] = report_to_json(ab.zero_gamma);
  j["best_report"] = report_to_json(ab.best_gamma);
  return j;
}

}  // namespace gastl
