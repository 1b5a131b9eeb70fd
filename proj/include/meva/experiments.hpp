#pragma once

#include <string>
#include <vector>

#include "meva/tabular.hpp"
#include "meva/theory.hpp"

namespace meva {

/// Common experiment settings; each runner reads the fields it needs.
struct RunConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  bool dump_fields = false;
  bool plots = false;

  // pde experiments
  int grid = 64;        // Laplace grid (grid x grid); Burgers space cells
  int time_levels = 385;  // Burgers time levels (dt = 1/(nt-1))
  int n_train = 60;
  int n_test = 20;
  int subsample = 40;   // training points kept per function
  double agg_reg = 1e-4;
  int anchor_budget = 2000;
  int gp_colloc = 400;
  double gp_lengthscale = 0.2;
  double burgers_nu = 2e-3;
  int reference_nx = 1024;

  // theorem experiment
  std::vector<int> ns_list = {50, 100, 200, 400, 800, 1600, 3200, 6400, 12800, 25600, 51200};
  int trials = 500;

  // nested kriging
  int nk_models = 10;
  int nk_colloc = 20;
  int nk_boundary = 12;
  double nk_lengthscale = 0.5;
  int nk_grid = 48;

  // tabular
  std::string data_path;
  std::string target_column = "target";
  int n_splits = 20;

  // pathological examples
  double path_reg = 1e-8;
  int path_iters = 60;
};

struct Pathological1Result {
  double good_coeff_magnitude = 0;   // max |alpha_G(x)| of the linear MEEA on the grid
  double line_deviation = 0;         // max |aggregate - least-squares line|
  double meea_grid_mse = 0;
  double meva_grid_mse = 0;
};

struct Pathological2Result {
  double meea_train_mse = 0;
  double meea_gap_mse = 0;   // test MSE on [-0.5, 0.5]
  double meva_gap_mse = 0;
  double good_model_gap_mse = 0;
  double meva_mean_weight_good = 0;  // mean weight on M_G over the gap
};

struct PdeExperimentResult {
  std::vector<std::string> solver_ids;
  std::vector<double> solver_geo_log10;  // per solver geometric-mean log10 MSE
  double aggregate_geo_log10 = 0;
  double mean_baseline_geo_log10 = 0;
  double best_solver_geo_log10 = 0;
  int exceed_worst_count = 0;  // test samples where the aggregate beats no one
  int n_test = 0;
};

struct TheoremExperimentResult {
  RateResult corr;   // t != 0 case
  RateResult uncorr; // b = 0 case
};

struct NestedKrigingExperimentResult {
  std::vector<double> model_mse;
  double aggregate_mse = 0;
  double uniform_mse = 0;
  int fallback_points = 0;
};

Pathological1Result run_pathological1(const RunConfig& cfg);
Pathological2Result run_pathological2(const RunConfig& cfg);
TheoremExperimentResult run_theorem(const RunConfig& cfg);
PdeExperimentResult run_laplace(const RunConfig& cfg);
PdeExperimentResult run_burgers(const RunConfig& cfg);
TabularReport run_tabular(const RunConfig& cfg);
NestedKrigingExperimentResult run_nested_kriging(const RunConfig& cfg);

/// Dispatches on cfg.experiment, writes CSVs and a manifest into cfg.out_dir,
/// optionally renders plots. Returns the process exit status.
int run_experiment(const RunConfig& cfg);

/// Parses a `key = value` config file into cfg (unknown keys are an error).
void apply_config_file(RunConfig& cfg, const std::string& path);

}  // namespace meva
