// Command-line front end: run a single experiment, sweep a hyperparameter
// grid, compare gamma = 0 against the best gamma, or emit synthetic CSVs.
//
// Exit codes: 0 success, 1 invalid configuration, 2 data error, 3 numerical
// failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gastl/gastl.hpp"
#include "gastl/serialize.hpp"

namespace {

struct CommonOpts {
  std::string source;
  std::string target_train;
  std::string target_test;
  std::string label_column;
  int hidden_size = 10;
  double mu = 1.0;
  double lambda = 0.01;
  double gamma = 0.0;
  int knn = 5;
  double sigma2 = 1.0;
  double epsilon = 1e-8;
  std::string p = "all";
  std::string scheme = "A";
  std::string mode = "soft";
  int max_outer = 10;
  int lbfgs_iters = 400;
  int lbfgs_memory = 100;
  std::uint64_t seed = 0;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--source", o.source, "Unlabeled source CSV (samples as rows)")->required();
  cmd->add_option("--target-train", o.target_train, "Labeled target training CSV")->required();
  cmd->add_option("--target-test", o.target_test, "Labeled target test CSV")->required();
  cmd->add_option("--label-column", o.label_column,
                  "Label column name for files with a '#' header; headerless files use the last column");
  cmd->add_option("--hidden-size", o.hidden_size, "Autoencoder hidden layer size")
      ->capture_default_str();
  cmd->add_option("--mu", o.mu, "Domain-mapping balance")->capture_default_str();
  cmd->add_option("--lambda", o.lambda, "Row-sparsity balance")->capture_default_str();
  cmd->add_option("--gamma", o.gamma, "Local-structure balance")->capture_default_str();
  cmd->add_option("--knn", o.knn, "Neighbour count for the similarity graph")
      ->capture_default_str();
  cmd->add_option("--sigma2", o.sigma2, "Scheme B Gaussian variance")->capture_default_str();
  cmd->add_option("--epsilon", o.epsilon, "IRLS reweighting constant")->capture_default_str();
  cmd->add_option("--p", o.p, "Source samples to keep: a count, 'all', or 'none'")
      ->capture_default_str();
  cmd->add_option("--scheme", o.scheme, "Transferability scheme")
      ->check(CLI::IsMember({"A", "B"}))
      ->capture_default_str();
  cmd->add_option("--mode", o.mode, "Pseudo-label mode")
      ->check(CLI::IsMember({"soft", "hard"}))
      ->capture_default_str();
  cmd->add_option("--max-outer", o.max_outer, "Outer alternation rounds")
      ->capture_default_str();
  cmd->add_option("--lbfgs-iters", o.lbfgs_iters, "L-BFGS iteration cap")
      ->capture_default_str();
  cmd->add_option("--lbfgs-memory", o.lbfgs_memory, "L-BFGS curvature pairs kept")
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "Base random seed")->capture_default_str();
  cmd->add_option("--out", o.out, "Report path (stdout when omitted)");
}

gastl::ExperimentConfig to_config(const CommonOpts& o) {
  gastl::ExperimentConfig cfg;
  gastl::DataFiles files;
  files.source = o.source;
  files.target_train = o.target_train;
  files.target_test = o.target_test;
  files.label_column = o.label_column;
  cfg.files = files;
  cfg.hyper.m = o.hidden_size;
  cfg.hyper.mu = o.mu;
  cfg.hyper.lambda = o.lambda;
  cfg.hyper.gamma = o.gamma;
  cfg.hyper.k = o.knn;
  cfg.hyper.epsilon = o.epsilon;
  cfg.hyper.max_outer = o.max_outer;
  cfg.hyper.lbfgs.max_iterations = o.lbfgs_iters;
  cfg.hyper.lbfgs.memory = o.lbfgs_memory;
  cfg.p = gastl::PChoice::parse(o.p);
  cfg.scheme = o.scheme == "A" ? gastl::Scheme::A : gastl::Scheme::B;
  cfg.mode = o.mode == "soft" ? gastl::LabelMode::soft : gastl::LabelMode::hard;
  cfg.sigma2 = o.sigma2;
  cfg.seed = o.seed;
  cfg.out_path = o.out;
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw gastl::parse_error(path + ": cannot open for writing");
  out << text;
  if (!out.flush()) throw gastl::parse_error(path + ": write failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Source-sample selection for self-taught transfer learning"};
  app.require_subcommand(1);

  CommonOpts run_opts;
  CLI::App* run_cmd = app.add_subcommand("run", "Run a single experiment");
  add_common(run_cmd, run_opts);

  CommonOpts grid_opts;
  std::vector<int> m_list{10, 50, 100, 200};
  std::vector<double> lambda_list{1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  std::vector<double> gamma_list{0.0, 1e-4, 1e-3, 1e-2, 1e-1};
  std::vector<std::string> p_list;
  std::string grid_csv;
  CLI::App* grid_cmd = app.add_subcommand("grid", "Sweep a hyperparameter grid");
  add_common(grid_cmd, grid_opts);
  grid_cmd->add_option("--m-list", m_list, "Hidden sizes to sweep")
      ->delimiter(',')->capture_default_str();
  grid_cmd->add_option("--lambda-list", lambda_list, "Lambda values to sweep")
      ->delimiter(',')->capture_default_str();
  grid_cmd->add_option("--gamma-list", gamma_list, "Gamma values to sweep")
      ->delimiter(',')->capture_default_str();
  grid_cmd->add_option("--p-list", p_list,
                       "p values to sweep (counts, 'all', 'none'); default schedule when omitted")
      ->delimiter(',');
  grid_cmd->add_option("--csv", grid_csv, "Also write the full grid table as CSV");

  CommonOpts ablate_opts;
  std::vector<double> ablate_gammas{0.0, 1e-4, 1e-3, 1e-2, 1e-1};
  CLI::App* ablate_cmd =
      app.add_subcommand("ablate-gamma", "Compare gamma = 0 against the best gamma");
  add_common(ablate_cmd, ablate_opts);
  ablate_cmd->add_option("--gamma-list", ablate_gammas, "Gamma values (must include 0)")
      ->delimiter(',')->capture_default_str();

  int synth_dim = 10, synth_clusters = 3, synth_src = 30, synth_trg = 15;
  int synth_test = -1, synth_relevant = 2;
  double synth_noise = 0.08;
  std::uint64_t synth_seed = 0;
  std::string synth_dir = ".";
  CLI::App* synth_cmd = app.add_subcommand("synth", "Emit a synthetic CSV bundle");
  synth_cmd->add_option("--dim", synth_dim, "Feature dimension")->capture_default_str();
  synth_cmd->add_option("--clusters", synth_clusters, "Total clusters")->capture_default_str();
  synth_cmd->add_option("--src-per-cluster", synth_src, "Source samples per cluster")
      ->capture_default_str();
  synth_cmd->add_option("--trg-per-class", synth_trg, "Target training samples per class")
      ->capture_default_str();
  synth_cmd->add_option("--test-per-class", synth_test,
                        "Target test samples per class (-1: same as training)")
      ->capture_default_str();
  synth_cmd->add_option("--relevant", synth_relevant, "Clusters that form target classes")
      ->capture_default_str();
  synth_cmd->add_option("--noise-sd", synth_noise, "Per-coordinate Gaussian noise")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth_seed, "Generator seed")->capture_default_str();
  synth_cmd->add_option("--out-dir", synth_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run_cmd->parsed()) {
      const gastl::ExperimentConfig cfg = to_config(run_opts);
      const gastl::ExperimentReport rep = gastl::run_experiment(cfg);
      write_text(cfg.out_path, gastl::report_to_json(rep).dump(2) + "\n");
    } else if (grid_cmd->parsed()) {
      const gastl::ExperimentConfig cfg = to_config(grid_opts);
      gastl::GridSpec spec;
      spec.m_values = m_list;
      spec.lambda_values = lambda_list;
      spec.gamma_values = gamma_list;
      if (p_list.empty()) {
        const gastl::DatasetBundle probe = gastl::load_bundle(*cfg.files);
        spec.p_values = gastl::default_p_schedule(probe.n_src());
      } else {
        for (const std::string& s : p_list) {
          spec.p_values.push_back(gastl::PChoice::parse(s));
        }
      }
      const gastl::GridResult grid = gastl::grid_search(cfg, spec);
      write_text(cfg.out_path, gastl::grid_to_json(grid).dump(2) + "\n");
      if (!grid_csv.empty()) write_text(grid_csv, gastl::grid_to_csv(grid, cfg));
    } else if (ablate_cmd->parsed()) {
      const gastl::ExperimentConfig cfg = to_config(ablate_opts);
      const gastl::AblationResult ab = gastl::gamma_ablation(cfg, ablate_gammas);
      write_text(cfg.out_path, gastl::ablation_to_json(ab).dump(2) + "\n");
    } else if (synth_cmd->parsed()) {
      const gastl::SyntheticTransfer st = gastl::make_synthetic_transfer(
          synth_dim, synth_clusters, synth_src, synth_trg, synth_relevant,
          synth_noise, synth_seed, synth_test);
      namespace fs = std::filesystem;
      fs::create_directories(synth_dir);
      const fs::path dir(synth_dir);
      gastl::save_csv_matrix((dir / "source.csv").string(), st.bundle.x_src);
      gastl::save_csv_matrix((dir / "target_train.csv").string(), st.bundle.x_trg,
                             st.bundle.y_trg);
      gastl::save_csv_matrix((dir / "target_test.csv").string(), st.bundle.x_test,
                             st.bundle.y_test);
      gastl::ordered_json meta;
      meta["dim"] = synth_dim;
      meta["clusters"] = synth_clusters;
      meta["n_src_per_cluster"] = synth_src;
      meta["n_trg_per_class"] = synth_trg;
      meta["n_test_per_class"] = synth_test < 0 ? synth_trg : synth_test;
      meta["relevant_clusters"] = synth_relevant;
      meta["noise_sd"] = synth_noise;
      meta["seed"] = synth_seed;
      meta["source_cluster"] = st.source_cluster;
      std::vector<int> rel(st.source_relevant.begin(), st.source_relevant.end());
      meta["source_relevant"] = rel;
      write_text((dir / "meta.json").string(), meta.dump(2) + "\n");
      std::cout << "wrote " << (dir / "source.csv").string() << ", target_train.csv, "
                << "target_test.csv, meta.json\n";
    }
  } catch (const gastl::parse_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const gastl::numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
