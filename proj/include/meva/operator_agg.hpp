#pragma once

#include <vector>

#include "meva/grid.hpp"
#include "meva/rng.hpp"
#include "meva/train.hpp"

namespace meva {

/// Pointwise feature vector at grid node (i, j) of the model fields:
/// [omega coords; f(omega); M_1..M_n(omega); local mean of f; local means of
/// M_1..M_n], in this fixed order. Local means are 3x3 (3-point for 1-D
/// fields) with clamped-edge neighborhoods. The input f may be 1-D (indexed
/// by i) while the model fields are 2-D.
Vector featurize(const GridFunction& input, const std::vector<GridFunction>& model_fields, int i, int j);

/// One row per retained (function, grid point) pair.
struct OperatorDataset {
  Matrix features;
  Matrix errors;        // per-model errors at the point
  Vector targets;       // ground truth at the point
  std::vector<int> sample_index;
  std::vector<int> grid_index;

  Eigen::Index count() const { return features.rows(); }
};

struct OperatorTrainingSample {
  GridFunction input;
  std::vector<GridFunction> model_fields;
  GridFunction truth;
};

/// Uniformly subsamples `subsample` grid points per training function.
OperatorDataset build_dataset(const std::vector<OperatorTrainingSample>& samples, int subsample, Rng& rng);

struct OperatorAggregate {
  MevaAggregator meva;
  Vector feat_mean;
  Vector feat_scale;
  int n_models = 0;

  /// asinh-compresses raw features (clamped solver fields otherwise crush
  /// the dynamic range of the standardization), then applies the training
  /// mean/scale.
  Matrix standardize(const Matrix& raw) const;
};

/// Sharp-loss fit on the flattened dataset. Features are standardized with
/// training statistics; the kernel lengthscale defaults to the median
/// heuristic when spec.lengthscale <= 0. At most anchor_budget rows are kept
/// as anchors (uniform subsample).
OperatorAggregate fit_operator_meva(const OperatorDataset& ds, const KernelSpec& spec, double reg,
                                    int anchor_budget, Rng& rng);

struct OperatorPrediction {
  GridFunction aggregate;
  std::vector<GridFunction> weight_fields;
};

OperatorPrediction predict_operator(const OperatorAggregate& agg, const GridFunction& input,
                                    const std::vector<GridFunction>& model_fields);

/// Mean over entries of log10(max(value, 1e-300)); the Tables 1-2 metric.
double geometric_mean_log10_mse(const std::vector<double>& per_sample_mse);

double grid_mse(const GridFunction& a, const GridFunction& b);

}  // namespace meva
