#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "meva/experiments.hpp"
#include "meva/plots.hpp"

int main(int argc, char** argv) {
  CLI::App app{"meva: minimal-variance model aggregation experiments"};
  app.require_subcommand(1);

  meva::RunConfig cfg;
  if (const char* env = std::getenv("MEVA_SEED")) cfg.seed = std::strtoull(env, nullptr, 10);

  auto* run = app.add_subcommand("run", "run an experiment and write CSV artifacts");
  std::string config_path;
  std::string ns_csv;
  run->add_option("experiment", cfg.experiment,
                  "one of: pathological1, pathological2, tabular, laplace, burgers, theorem, nested-kriging")
      ->required();
  run->add_option("--config", config_path, "key = value config file (flags override)");
  run->add_option("--seed", cfg.seed, "rng seed (default: MEVA_SEED env or 0)");
  run->add_option("--out", cfg.out_dir, "output directory");
  run->add_option("--grid", cfg.grid, "grid size (Laplace: grid^2; Burgers: space cells)");
  run->add_option("--time-levels", cfg.time_levels, "Burgers time levels, dt = 1/(nt-1)");
  run->add_option("--n-train", cfg.n_train, "training functions");
  run->add_option("--n-test", cfg.n_test, "test functions");
  run->add_option("--subsample", cfg.subsample, "training points per function");
  run->add_option("--agg-reg", cfg.agg_reg, "aggregation fit regularization");
  run->add_option("--anchor-budget", cfg.anchor_budget, "max anchors for the aggregation fit");
  run->add_option("--gp-colloc", cfg.gp_colloc, "GP solver collocation points");
  run->add_option("--trials", cfg.trials, "theorem experiment trials per N");
  run->add_option("--Ns", ns_csv, "comma-separated N values for the theorem experiment");
  run->add_option("--data", cfg.data_path, "regression CSV path (tabular)");
  run->add_option("--target", cfg.target_column, "target column name (tabular)");
  run->add_option("--n-splits", cfg.n_splits, "tabular split count");
  run->add_flag("--dump-fields", cfg.dump_fields, "write weight/aggregate fields in MEVA-GRID format");
  run->add_flag("--plots", cfg.plots, "render SVG plots");

  auto* plot = app.add_subcommand("plot", "render an SVG from an experiment CSV");
  std::string plot_csv, plot_kind = "pde", plot_out = ".";
  plot->add_option("csv", plot_csv, "experiment results CSV")->required();
  plot->add_option("--kind", plot_kind, "pde | tabular | theorem");
  plot->add_option("--out", plot_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (!config_path.empty()) {
        // file values fill in everything the user did not pass explicitly
        meva::RunConfig merged;
        if (const char* env = std::getenv("MEVA_SEED")) merged.seed = std::strtoull(env, nullptr, 10);
        meva::apply_config_file(merged, config_path);
        if (run->count("--seed")) merged.seed = cfg.seed;
        if (run->count("--out")) merged.out_dir = cfg.out_dir;
        if (run->count("--grid")) merged.grid = cfg.grid;
        if (run->count("--time-levels")) merged.time_levels = cfg.time_levels;
        if (run->count("--n-train")) merged.n_train = cfg.n_train;
        if (run->count("--n-test")) merged.n_test = cfg.n_test;
        if (run->count("--subsample")) merged.subsample = cfg.subsample;
        if (run->count("--agg-reg")) merged.agg_reg = cfg.agg_reg;
        if (run->count("--anchor-budget")) merged.anchor_budget = cfg.anchor_budget;
        if (run->count("--gp-colloc")) merged.gp_colloc = cfg.gp_colloc;
        if (run->count("--trials")) merged.trials = cfg.trials;
        if (run->count("--data")) merged.data_path = cfg.data_path;
        if (run->count("--target")) merged.target_column = cfg.target_column;
        if (run->count("--n-splits")) merged.n_splits = cfg.n_splits;
        if (run->count("--dump-fields")) merged.dump_fields = cfg.dump_fields;
        if (run->count("--plots")) merged.plots = cfg.plots;
        merged.experiment = cfg.experiment;
        cfg = merged;
      }
      if (!ns_csv.empty()) {
        cfg.ns_list.clear();
        std::stringstream ss(ns_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) cfg.ns_list.push_back(std::stoi(tok));
      }
      return meva::run_experiment(cfg);
    }
    if (plot->parsed()) {
      const auto files = meva::emit_plots(plot_csv, meva::plot_kind_from_string(plot_kind), plot_out);
      for (const auto& f : files) std::cout << f << "\n";
      return 0;
    }
  } catch (const meva::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
