#pragma once

#include <memory>
#include <string>
#include <vector>

#include "meva/kernels.hpp"
#include "meva/rng.hpp"

namespace meva {

struct TabularDataset {
  Matrix features;  // N x d
  Vector targets;
  std::vector<std::string> feature_names;
  std::string target_name;
  int dropped_rows = 0;

  Eigen::Index count() const { return features.rows(); }
};

/// Parses a comma-separated file with a header row. Rows with a missing or
/// non-numeric cell are dropped and counted.
TabularDataset load_csv(const std::string& path, const std::string& target_column);

struct SplitResult {
  TabularDataset train, val, test;
};

/// Disjoint seeded split with sizes within one of N * ratio.
SplitResult split(const TabularDataset& ds, double train_ratio, double val_ratio, double test_ratio, Rng& rng);

/// Per-feature standardization fitted on the training split only.
struct Standardizer {
  Vector mean, scale;

  static Standardizer fit(const Matrix& x);
  Matrix transform(const Matrix& x) const;
};

class BaseLearner {
public:
  virtual ~BaseLearner() = default;
  virtual void fit(const Matrix& x, const Vector& y) = 0;
  virtual Vector predict(const Matrix& x) const = 0;
  virtual std::string name() const = 0;
};

/// Closed-form penalized least squares on standardized features.
std::unique_ptr<BaseLearner> make_ridge(double reg);
/// Mean of the k nearest targets in standardized Euclidean distance.
std::unique_ptr<BaseLearner> make_knn(int k);
/// Gradient boosting of depth-limited regression trees on squared loss.
std::unique_ptr<BaseLearner> make_gbt(int rounds, double shrinkage, int max_depth);
/// Kernel ridge regression with the Matern-3/2 kernel (median-heuristic rho).
std::unique_ptr<BaseLearner> make_krr(double reg);

struct TabularConfig {
  std::string csv_path;
  std::string target_column;
  int n_splits = 20;
  double train_ratio = 0.6, val_ratio = 0.2, test_ratio = 0.2;
  std::uint64_t seed = 0;
  double meva_reg = 1e-3;
  double meea_reg = 1e-3;
  double direct_reg = 1e-4;
  int direct_steps = 200;
  double direct_lr = 0.05;
};

struct TabularSplitReport {
  std::uint64_t split_seed = 0;
  std::vector<std::string> model_names;
  std::vector<double> train_model_mse;     // learners fitted on train only
  std::vector<double> trainval_model_mse;  // learners fitted on train+val
  double mean_baseline_mse = 0;            // uniform average of train-fitted learners
  double meva_mse = 0;
  double meea_mse = 0;
  double direct_mse = 0;
};

struct TabularReport {
  std::vector<TabularSplitReport> splits;
  std::vector<std::string> model_names;
  double mean_meva_mse = 0, mean_meea_mse = 0, mean_direct_mse = 0, mean_uniform_mse = 0;
  double mean_best_train_mse = 0;   // best train-fitted learner, averaged over splits
  double mean_best_overall_mse = 0;
  double r_train = 0;  // 1 - MSE(meva) / MSE(best train-fitted learner)
  double r_all = 0;
};

TabularReport run_tabular_experiment(const TabularConfig& cfg);

/// Writes a deterministic synthetic regression CSV (Friedman-style response
/// with extra linear and noise columns) for demos and tests.
void write_synthetic_regression_csv(const std::string& path, int rows, int features, std::uint64_t seed);

}  // namespace meva
