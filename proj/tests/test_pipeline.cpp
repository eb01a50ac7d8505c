#include <cstdio>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "gastl/classifier.hpp"
#include "gastl/dataset.hpp"
#include "gastl/errors.hpp"
#include "gastl/pipeline.hpp"

using gastl::ExperimentConfig;
using gastl::Matrix;
using gastl::PChoice;
using gastl::SyntheticSpec;
using gastl::Vector;

namespace {

// Small but non-degenerate synthetic problem shared across the tests.
ExperimentConfig quick_config() {
  ExperimentConfig cfg;
  SyntheticSpec spec;
  spec.d = 6;
  spec.clusters = 3;
  spec.n_src_per_cluster = 8;   // n_src = 24
  spec.n_trg_per_class = 8;     // n_trg = 16, two classes
  spec.relevant_clusters = 2;
  spec.noise_sd = 0.08;
  cfg.synth = spec;
  cfg.hyper.m = 4;
  cfg.hyper.k = 3;
  cfg.hyper.max_outer = 2;
  cfg.hyper.lbfgs.max_iterations = 60;
  cfg.seed = 3;
  return cfg;
}

}  // namespace

TEST(PChoiceParse, AcceptsCountsAllAndNone) {
  EXPECT_EQ(PChoice::parse("all").kind, PChoice::Kind::all);
  EXPECT_EQ(PChoice::parse("none").kind, PChoice::Kind::none);
  const auto c = PChoice::parse("25");
  EXPECT_EQ(c.kind, PChoice::Kind::count);
  EXPECT_EQ(c.count, 25);
  EXPECT_EQ(c.str(), "25");

  EXPECT_THROW(PChoice::parse("-3"), gastl::invalid_input_error);
  EXPECT_THROW(PChoice::parse("12x"), gastl::invalid_input_error);
  EXPECT_THROW(PChoice::parse(""), gastl::invalid_input_error);
  EXPECT_THROW(PChoice::parse("1e3"), gastl::invalid_input_error);

  EXPECT_DOUBLE_EQ(PChoice::parse("none").order_key(24), -1.0);
  EXPECT_DOUBLE_EQ(PChoice::parse("7").order_key(24), 7.0);
  EXPECT_DOUBLE_EQ(PChoice::parse("all").order_key(24), 24.0);
}

TEST(DefaultPSchedule, ClipsToTheSourceCount) {
  const auto big = gastl::default_p_schedule(437);
  ASSERT_EQ(big.size(), 17u);  // 10..100, 150..400, then "all"
  EXPECT_EQ(big.front().str(), "10");
  EXPECT_EQ(big[9].str(), "100");
  EXPECT_EQ(big[10].str(), "150");
  EXPECT_EQ(big[15].str(), "400");
  EXPECT_EQ(big.back().kind, PChoice::Kind::all);

  const auto small = gastl::default_p_schedule(8);
  ASSERT_EQ(small.size(), 1u);
  EXPECT_EQ(small.front().kind, PChoice::Kind::all);
}

TEST(RunExperiment, RequiresExactlyOneDataOrigin) {
  ExperimentConfig cfg;
  EXPECT_THROW(gastl::run_experiment(cfg), gastl::invalid_input_error);
  cfg = quick_config();
  cfg.files = gastl::DataFiles{};
  EXPECT_THROW(gastl::run_experiment(cfg), gastl::invalid_input_error);
}

TEST(RunExperiment, NoneMatchesAStandaloneTargetOnlyRun) {
  auto cfg = quick_config();
  cfg.p = PChoice::parse("none");
  const auto rep = gastl::run_experiment(cfg);
  EXPECT_TRUE(rep.target_only);
  EXPECT_FALSE(rep.wt_fallback);
  EXPECT_TRUE(rep.selected.empty());
  EXPECT_TRUE(rep.objective_trace.empty());

  // Rebuild the baseline by hand: same scaling, one-hot targets, unit
  // weights, same optimizer settings.
  const auto raw = gastl::resolve_bundle(cfg);
  const auto scaled = gastl::scale_bundle(raw);
  gastl::WeightedTrainingSet ts;
  ts.x = scaled.x_trg;
  ts.labels = Matrix::Zero(scaled.n_trg(), scaled.n_ctrg);
  for (Eigen::Index i = 0; i < scaled.n_trg(); ++i) {
    ts.labels(i, scaled.y_trg[static_cast<std::size_t>(i)]) = 1.0;
  }
  ts.weights = Vector::Ones(scaled.n_trg());
  const auto clf = gastl::train_softmax(ts, cfg.hyper.lbfgs, cfg.seed);
  const auto pred = gastl::predict(clf, scaled.x_test);
  EXPECT_DOUBLE_EQ(rep.test_accuracy, gastl::accuracy(pred.labels, scaled.y_test));
}

TEST(RunExperiment, ReportsAreDeterministic) {
  auto cfg = quick_config();
  cfg.p = PChoice::parse("10");
  const auto a = gastl::run_experiment(cfg);
  const auto b = gastl::run_experiment(cfg);
  EXPECT_EQ(a.test_accuracy, b.test_accuracy);
  EXPECT_EQ(a.per_class_accuracy, b.per_class_accuracy);
  EXPECT_EQ(a.selected, b.selected);
  EXPECT_EQ(a.objective_trace, b.objective_trace);
  EXPECT_EQ(a.wt.min, b.wt.min);
  EXPECT_EQ(a.wt.max, b.wt.max);
  EXPECT_EQ(a.wt.mean, b.wt.mean);
  EXPECT_EQ(a.wt.nonzero, b.wt.nonzero);
}

TEST(RunExperiment, ReportShapeAndSelection) {
  auto cfg = quick_config();
  cfg.p = PChoice::parse("10");
  const auto rep = gastl::run_experiment(cfg);
  EXPECT_FALSE(rep.target_only);
  EXPECT_EQ(rep.selected.size(), 10u);
  EXPECT_GE(rep.test_accuracy, 0.0);
  EXPECT_LE(rep.test_accuracy, 1.0);
  EXPECT_EQ(rep.per_class_accuracy.size(), 2u);
  EXPECT_GE(rep.objective_trace.size(), 2u);
  EXPECT_GE(rep.wt.max, rep.wt.mean);
  EXPECT_GE(rep.wt.mean, rep.wt.min);
  // Selection is ordered by weight, ties to the lower index.
  const auto again = gastl::run_experiment(cfg);
  EXPECT_EQ(rep.selected, again.selected);
}

TEST(RunExperiment, ZeroCountKeepsTheTransferPathButSelectsNothing) {
  auto cfg = quick_config();
  cfg.p = PChoice::parse("0");
  const auto rep = gastl::run_experiment(cfg);
  EXPECT_FALSE(rep.target_only);
  EXPECT_TRUE(rep.selected.empty());
  EXPECT_GE(rep.objective_trace.size(), 2u);
}

TEST(RunExperiment, AllAndExplicitFullCountAgree) {
  auto cfg = quick_config();
  cfg.p = PChoice::parse("all");
  const auto a = gastl::run_experiment(cfg);
  cfg.p = PChoice::parse("24");
  const auto b = gastl::run_experiment(cfg);
  EXPECT_EQ(a.selected, b.selected);
  EXPECT_DOUBLE_EQ(a.test_accuracy, b.test_accuracy);
}

TEST(RunExperiment, OversizedCountIsRejected) {
  auto cfg = quick_config();
  cfg.p = PChoice::parse("25");  // n_src is 24
  EXPECT_THROW(gastl::run_experiment(cfg), gastl::invalid_input_error);
}

TEST(RunExperiment, SchemeBAndHardLabelsRunEndToEnd) {
  auto cfg = quick_config();
  cfg.p = PChoice::parse("12");
  cfg.scheme = gastl::Scheme::B;
  cfg.mode = gastl::LabelMode::hard;
  cfg.sigma2 = 0.5;
  const auto rep = gastl::run_experiment(cfg);
  EXPECT_GE(rep.test_accuracy, 0.0);
  EXPECT_LE(rep.test_accuracy, 1.0);
  EXPECT_EQ(rep.selected.size(), 12u);
}

TEST(LoadBundle, RoundTripsSynthDataThroughCsvFiles) {
  const auto synth = gastl::make_synthetic_transfer(5, 3, 6, 7, 2, 0.05, 11);
  const std::string dir = ::testing::TempDir();
  const std::string src = dir + "gastl_test_source.csv";
  const std::string trn = dir + "gastl_test_train.csv";
  const std::string tst = dir + "gastl_test_test.csv";
  gastl::save_csv_matrix(src, synth.bundle.x_src);
  gastl::save_csv_matrix(trn, synth.bundle.x_trg, synth.bundle.y_trg);
  gastl::save_csv_matrix(tst, synth.bundle.x_test, synth.bundle.y_test);

  gastl::DataFiles files;
  files.source = src;
  files.target_train = trn;
  files.target_test = tst;
  const auto loaded = gastl::load_bundle(files);
  EXPECT_EQ(loaded.x_src, synth.bundle.x_src);
  EXPECT_EQ(loaded.x_trg, synth.bundle.x_trg);
  EXPECT_EQ(loaded.x_test, synth.bundle.x_test);
  EXPECT_EQ(loaded.y_trg, synth.bundle.y_trg);
  EXPECT_EQ(loaded.y_test, synth.bundle.y_test);
  EXPECT_EQ(loaded.n_ctrg, synth.bundle.n_ctrg);

  std::remove(src.c_str());
  std::remove(trn.c_str());
  std::remove(tst.c_str());
}

TEST(GridSearch, CoversEveryCellAndPicksTheBest) {
  auto base = quick_config();
  base.p = PChoice::parse("10");
  gastl::GridSpec spec;
  spec.m_values = {3, 4};
  spec.lambda_values = {0.01, 0.1};
  spec.gamma_values = {0.0};
  spec.p_values = {PChoice::parse("10"), PChoice::parse("none")};
  const auto grid = gastl::grid_search(base, spec);
  ASSERT_EQ(grid.table.size(), 8u);
  double best_acc = -1.0;
  bool saw_target_only = false;
  for (const auto& cell : grid.table) {
    EXPECT_EQ(cell.status, "ok");
    ASSERT_TRUE(cell.report.has_value());
    best_acc = std::max(best_acc, cell.report->test_accuracy);
    if (cell.report->target_only) saw_target_only = true;
  }
  EXPECT_TRUE(saw_target_only);
  EXPECT_DOUBLE_EQ(grid.table[grid.best_index].report->test_accuracy, best_acc);
}

TEST(GridSearch, SingletonGridMatchesASingleRun) {
  auto base = quick_config();
  base.p = PChoice::parse("10");
  gastl::GridSpec spec;
  spec.m_values = {base.hyper.m};
  spec.lambda_values = {base.hyper.lambda};
  spec.gamma_values = {base.hyper.gamma};
  spec.p_values = {base.p};
  const auto grid = gastl::grid_search(base, spec);
  ASSERT_EQ(grid.table.size(), 1u);
  ASSERT_TRUE(grid.table[0].report.has_value());
  const auto solo = gastl::run_experiment(base);
  EXPECT_EQ(grid.table[0].report->test_accuracy, solo.test_accuracy);
  EXPECT_EQ(grid.table[0].report->selected, solo.selected);
  EXPECT_EQ(grid.table[0].report->objective_trace, solo.objective_trace);
}

TEST(GridSearch, IsolatesFailingCells) {
  auto base = quick_config();
  gastl::GridSpec spec;
  spec.m_values = {4};
  spec.lambda_values = {0.01};
  spec.gamma_values = {0.0};
  spec.p_values = {PChoice::parse("10"), PChoice::parse("200")};  // 200 > n_src
  const auto grid = gastl::grid_search(base, spec);
  ASSERT_EQ(grid.table.size(), 2u);
  EXPECT_EQ(grid.table[0].status, "ok");
  EXPECT_NE(grid.table[1].status, "ok");
  EXPECT_FALSE(grid.table[1].report.has_value());
  EXPECT_EQ(grid.best_index, 0u);
}

TEST(GridSearch, RejectsEmptyLists) {
  auto base = quick_config();
  gastl::GridSpec spec;
  spec.m_values = {};
  spec.lambda_values = {0.01};
  spec.gamma_values = {0.0};
  spec.p_values = {PChoice::parse("all")};
  EXPECT_THROW(gastl::grid_search(base, spec), gastl::invalid_input_error);
}

TEST(GammaAblation, ZeroOnlyListGivesZeroDelta) {
  auto base = quick_config();
  base.p = PChoice::parse("10");
  const auto ab = gastl::gamma_ablation(base, {0.0});
  EXPECT_DOUBLE_EQ(ab.accuracy_delta, 0.0);
  EXPECT_DOUBLE_EQ(ab.gamma_best, 0.0);
  EXPECT_EQ(ab.zero_gamma.test_accuracy, ab.best_gamma.test_accuracy);
}

TEST(GammaAblation, DeltaIsNeverNegative) {
  auto base = quick_config();
  base.p = PChoice::parse("10");
  const auto ab = gastl::gamma_ablation(base, {0.0, 1e-3, 1e-2});
  EXPECT_GE(ab.accuracy_delta, 0.0);
  EXPECT_THROW(gastl::gamma_ablation(base, {1e-3}), gastl::invalid_input_error);
}
