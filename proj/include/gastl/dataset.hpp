// Dataset loading, scaling, and synthesis. Samples are columns in memory
// (X is d x n); on disk one sample per row, so CSV I/O transposes.
//
// CSV dialect: UTF-8, comma separated, '.' decimal point, at most one
// comment/header line starting with '#'. When a header is present a label
// column can be addressed by name; without a header the label column is the
// last one. Labels are contiguous integers starting at 0.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gastl/errors.hpp"
#include "gastl/numerics.hpp"
#include "gastl/random.hpp"

namespace gastl {

struct DatasetBundle {
  Matrix x_src;              // d x n_src, unlabeled source samples
  Matrix x_trg;              // d x n_trg, labeled target training samples
  std::vector<int> y_trg;    // n_trg labels in [0, n_ctrg)
  Matrix x_test;             // d x n_test
  std::vector<int> y_test;   // n_test labels
  int n_ctrg = 0;            // number of target classes

  Eigen::Index dim() const { return x_src.rows(); }
  Eigen::Index n_src() const { return x_src.cols(); }
  Eigen::Index n_trg() const { return x_trg.cols(); }
  Eigen::Index n_test() const { return x_test.cols(); }
};

// Checks the structural invariants shared by all consumers.
inline void validate_bundle(const DatasetBundle& b) {
  const Eigen::Index d = b.x_src.rows();
  if (d < 1 || b.x_src.cols() < 1) {
    throw invalid_input_error("bundle: source matrix is empty");
  }
  if (b.x_trg.rows() != d || b.x_test.rows() != d) {
    throw dimension_error("bundle: feature dimensions disagree across splits");
  }
  if (static_cast<Eigen::Index>(b.y_trg.size()) != b.x_trg.cols() ||
      static_cast<Eigen::Index>(b.y_test.size()) != b.x_test.cols()) {
    throw dimension_error("bundle: label count does not match sample count");
  }
  if (b.n_ctrg < 1) throw invalid_input_error("bundle: n_ctrg must be >= 1");
  std::vector<bool> seen(b.n_ctrg, false);
  for (int y : b.y_trg) {
    if (y < 0 || y >= b.n_ctrg) {
      throw invalid_input_error("bundle: target label out of range");
    }
    seen[y] = true;
  }
  for (int c = 0; c < b.n_ctrg; ++c) {
    if (!seen[c]) {
      throw invalid_input_error("bundle: class " + std::to_string(c) +
                                " missing from target training labels");
    }
  }
  for (int y : b.y_test) {
    if (y < 0 || y >= b.n_ctrg) {
      throw invalid_input_error("bundle: test label out of range");
    }
  }
}

// Per-feature min-max statistics. Fit on source plus target-training data;
// applying them to that data yields entries in [0, 1].
struct ScalingParams {
  Vector feature_min;    // d
  Vector feature_range;  // d, entries >= 0; 0 marks a constant feature
};

inline ScalingParams fit_scaler(const Matrix& x_src, const Matrix& x_trg) {
  if (x_src.rows() != x_trg.rows()) {
    throw dimension_error("fit_scaler: feature dimensions disagree");
  }
  const Eigen::Index d = x_src.rows();
  ScalingParams s;
  s.feature_min = Vector(d);
  s.feature_range = Vector(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Eigen::Index j = 0; j < x_src.cols(); ++j) {
      lo = std::min(lo, x_src(i, j));
      hi = std::max(hi, x_src(i, j));
    }
    for (Eigen::Index j = 0; j < x_trg.cols(); ++j) {
      lo = std::min(lo, x_trg(i, j));
      hi = std::max(hi, x_trg(i, j));
    }
    s.feature_min(i) = lo;
    s.feature_range(i) = hi - lo;
  }
  return s;
}

// (x - min) / range per feature, clipped to [0, 1]. Constant features
// (range 0) map to 0.5.
inline Matrix apply_scaler(const Matrix& x, const ScalingParams& s) {
  if (x.rows() != s.feature_min.size()) {
    throw dimension_error("apply_scaler: feature dimension mismatch");
  }
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double lo = s.feature_min(i);
    const double range = s.feature_range(i);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (range == 0.0) {
        out(i, j) = 0.5;
      } else {
        out(i, j) = std::clamp((x(i, j) - lo) / range, 0.0, 1.0);
      }
    }
  }
  return out;
}

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline double parse_cell(const std::string& raw, const std::string& path,
                         std::size_t line_no) {
  const std::string cell = trim(raw);
  if (cell.empty()) {
    throw parse_error(path + ":" + std::to_string(line_no) + ": empty cell");
  }
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size()) {
    throw parse_error(path + ":" + std::to_string(line_no) +
                      ": non-numeric cell '" + cell + "'");
  }
  return v;
}

}  // namespace detail

struct CsvMatrix {
  Matrix data;                            // d x n, samples as columns
  std::optional<std::vector<int>> labels; // present iff a label column was requested
};

// Reads a rectangular numeric CSV with one sample per row and returns the
// transposed d x n matrix. If label_column is given, that column is split off
// as integer labels: matched by name against the '#' header when one exists,
// otherwise taken to be the last column.
inline CsvMatrix load_csv_matrix(
    const std::string& path,
    const std::optional<std::string>& label_column = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw parse_error(path + ": cannot open file");

  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    if (first_content_line && line[0] == '#') {
      for (const auto& name : detail::split_csv_line(line.substr(1))) {
        header.push_back(detail::trim(name));
      }
      first_content_line = false;
      continue;
    }
    first_content_line = false;
    const auto cells = detail::split_csv_line(line);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) {
      row.push_back(detail::parse_cell(cell, path, line_no));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw parse_error(path + ":" + std::to_string(line_no) +
                        ": ragged row, expected " +
                        std::to_string(rows.front().size()) + " cells, got " +
                        std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw invalid_input_error(path + ": no data rows");

  const std::size_t n_cols = rows.front().size();
  std::optional<std::size_t> label_idx;
  if (label_column) {
    if (!header.empty()) {
      auto it = std::find(header.begin(), header.end(), *label_column);
      if (it == header.end()) {
        throw parse_error(path + ": label column '" + *label_column +
                          "' not found in header");
      }
      label_idx = static_cast<std::size_t>(it - header.begin());
    } else {
      label_idx = n_cols - 1;
    }
    if (n_cols < 2) {
      throw invalid_input_error(path + ": label column requested but file has a single column");
    }
  }

  CsvMatrix out;
  const std::size_t d = label_idx ? n_cols - 1 : n_cols;
  out.data = Matrix(static_cast<Eigen::Index>(d),
                    static_cast<Eigen::Index>(rows.size()));
  if (label_idx) out.labels.emplace();
  for (std::size_t s = 0; s < rows.size(); ++s) {
    std::size_t f = 0;
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (label_idx && c == *label_idx) {
        const double v = rows[s][c];
        if (v < 0.0 || v != std::floor(v)) {
          throw parse_error(path + ": label '" + std::to_string(v) +
                            "' is not a non-negative integer");
        }
        out.labels->push_back(static_cast<int>(v));
      } else {
        out.data(static_cast<Eigen::Index>(f++),
                 static_cast<Eigen::Index>(s)) = rows[s][c];
      }
    }
  }
  return out;
}

// Writes samples as rows with 17 significant digits so that a
// load -> save -> load round trip is lossless for finite doubles.
inline void save_csv_matrix(
    const std::string& path, const Matrix& x,
    const std::optional<std::vector<int>>& labels = std::nullopt,
    const std::optional<std::string>& label_name = std::nullopt) {
  if (labels && static_cast<Eigen::Index>(labels->size()) != x.cols()) {
    throw dimension_error("save_csv_matrix: label count mismatch");
  }
  std::ofstream out(path);
  if (!out) throw parse_error(path + ": cannot open file for writing");
  // Header only on request; headerless label files keep the label last, which
  // is where load_csv_matrix looks by default.
  if (label_name) {
    out << '#';
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      out << 'f' << i << ',';
    }
    out << *label_name << '\n';
  }
  char buf[40];
  for (Eigen::Index s = 0; s < x.cols(); ++s) {
    for (Eigen::Index f = 0; f < x.rows(); ++f) {
      std::snprintf(buf, sizeof(buf), "%.17g", x(f, s));
      out << buf;
      if (f + 1 < x.rows() || labels) out << ',';
    }
    if (labels) out << (*labels)[s];
    out << '\n';
  }
  if (!out) throw parse_error(path + ": write failed");
}

// A synthetic bundle plus the ground-truth relevance of each source sample
// (true iff the sample was drawn from one of the clusters that also generate
// target classes).
struct SyntheticTransfer {
  DatasetBundle bundle;
  std::vector<bool> source_relevant;  // n_src flags, cluster order
  std::vector<int> source_cluster;    // n_src cluster ids
};

// Draws `clusters` well-separated centers in [0,1]^d (greedy max-min
// placement), then samples target classes from the first relevant_clusters
// centers and source samples from every cluster. Source samples from the
// remaining clusters are irrelevant ground truth. noise_sd = 0 collapses all
// samples onto their centers. Deterministic per seed. n_test_per_class < 0
// defaults to n_trg_per_class.
inline SyntheticTransfer make_synthetic_transfer(
    int d, int clusters, int n_src_per_cluster, int n_trg_per_class,
    int relevant_clusters, double noise_sd, std::uint64_t seed,
    int n_test_per_class = -1) {
  if (d < 1 || clusters < 1 || n_src_per_cluster < 1 || n_trg_per_class < 1) {
    throw invalid_input_error("make_synthetic_transfer: counts must be >= 1");
  }
  if (relevant_clusters < 1 || relevant_clusters > clusters) {
    throw invalid_input_error(
        "make_synthetic_transfer: relevant_clusters must be in [1, clusters]");
  }
  if (noise_sd < 0.0) {
    throw invalid_input_error("make_synthetic_transfer: noise_sd must be >= 0");
  }
  if (n_test_per_class < 0) n_test_per_class = n_trg_per_class;

  Rng rng(seed);

  // Greedy max-min center placement keeps clusters apart for any seed.
  std::vector<Vector> centers;
  centers.reserve(clusters);
  for (int c = 0; c < clusters; ++c) {
    if (c == 0) {
      Vector v(d);
      for (int i = 0; i < d; ++i) v(i) = rng.uniform(0.15, 0.85);
      centers.push_back(v);
      continue;
    }
    Vector best(d);
    double best_sep = -1.0;
    for (int trial = 0; trial < 64; ++trial) {
      Vector cand(d);
      for (int i = 0; i < d; ++i) cand(i) = rng.uniform(0.15, 0.85);
      double sep = std::numeric_limits<double>::infinity();
      for (const auto& prev : centers) {
        sep = std::min(sep, (cand - prev).norm());
      }
      if (sep > best_sep) {
        best_sep = sep;
        best = cand;
      }
    }
    centers.push_back(best);
  }

  auto draw = [&](const Vector& center) {
    Vector v(d);
    for (int i = 0; i < d; ++i) v(i) = center(i) + noise_sd * rng.normal();
    return v;
  };

  SyntheticTransfer out;
  DatasetBundle& b = out.bundle;
  b.n_ctrg = relevant_clusters;

  b.x_trg = Matrix(d, static_cast<Eigen::Index>(relevant_clusters) * n_trg_per_class);
  for (int c = 0; c < relevant_clusters; ++c) {
    for (int s = 0; s < n_trg_per_class; ++s) {
      b.x_trg.col(static_cast<Eigen::Index>(c) * n_trg_per_class + s) = draw(centers[c]);
      b.y_trg.push_back(c);
    }
  }
  b.x_test = Matrix(d, static_cast<Eigen::Index>(relevant_clusters) * n_test_per_class);
  for (int c = 0; c < relevant_clusters; ++c) {
    for (int s = 0; s < n_test_per_class; ++s) {
      b.x_test.col(static_cast<Eigen::Index>(c) * n_test_per_class + s) = draw(centers[c]);
      b.y_test.push_back(c);
    }
  }
  b.x_src = Matrix(d, static_cast<Eigen::Index>(clusters) * n_src_per_cluster);
  for (int c = 0; c < clusters; ++c) {
    for (int s = 0; s < n_src_per_cluster; ++s) {
      b.x_src.col(static_cast<Eigen::Index>(c) * n_src_per_cluster + s) = draw(centers[c]);
      out.source_relevant.push_back(c < relevant_clusters);
      out.source_cluster.push_back(c);
    }
  }
  validate_bundle(b);
  return out;
}

// Applies min-max scaling fit on source + target-training data to every
// split of the bundle (test entries are clipped).
inline DatasetBundle scale_bundle(const DatasetBundle& b, ScalingParams* fitted = nullptr) {
  const ScalingParams s = fit_scaler(b.x_src, b.x_trg);
  DatasetBundle out = b;
  out.x_src = apply_scaler(b.x_src, s);
  out.x_trg = apply_scaler(b.x_trg, s);
  out.x_test = apply_scaler(b.x_test, s);
  if (fitted) *fitted = s;
  return out;
}

}  // namespace gastl
