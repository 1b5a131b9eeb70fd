#include "meva/operator_agg.hpp"

#include <cmath>

namespace meva {

namespace {

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

double local_mean(const GridFunction& g, int i, int j) {
  if (g.ny == 1) {
    double acc = 0.0;
    for (int di = -1; di <= 1; ++di) acc += g.at(clampi(i + di, 0, g.nx - 1), 0);
    return acc / 3.0;
  }
  double acc = 0.0;
  for (int di = -1; di <= 1; ++di)
    for (int dj = -1; dj <= 1; ++dj) acc += g.at(clampi(i + di, 0, g.nx - 1), clampi(j + dj, 0, g.ny - 1));
  return acc / 9.0;
}

}  // namespace

Vector featurize(const GridFunction& input, const std::vector<GridFunction>& model_fields, int i, int j) {
  if (model_fields.empty()) throw InvalidInput("featurize: empty model bank");
  const GridFunction& ref = model_fields.front();
  if (i < 0 || i >= ref.nx || j < 0 || j >= ref.ny) throw InvalidInput("featurize: omega off grid");
  const int n = static_cast<int>(model_fields.size());
  const int d_omega = ref.ny == 1 ? 1 : 2;
  Vector feat(d_omega + 2 * (n + 1));
  int p = 0;
  feat[p++] = ref.x_coord(i);
  if (d_omega == 2) feat[p++] = ref.y_coord(j);
  const int ij = input.ny == 1 ? 0 : j;
  feat[p++] = input.at(i, ij);
  for (const auto& m : model_fields) feat[p++] = m.at(i, j);
  feat[p++] = local_mean(input, i, input.ny == 1 ? 0 : j);
  for (const auto& m : model_fields) feat[p++] = local_mean(m, i, j);
  return feat;
}

OperatorDataset build_dataset(const std::vector<OperatorTrainingSample>& samples, int subsample, Rng& rng) {
  if (samples.empty()) throw InvalidInput("build_dataset: no samples");
  const GridFunction& ref = samples.front().model_fields.front();
  const int points = ref.nx * ref.ny;
  const int per_fn = std::min(subsample, points);
  const int n_models = static_cast<int>(samples.front().model_fields.size());
  const Eigen::Index rows = static_cast<Eigen::Index>(per_fn) * static_cast<Eigen::Index>(samples.size());

  OperatorDataset ds;
  const Eigen::Index dim = featurize(samples.front().input, samples.front().model_fields, 0, 0).size();
  ds.features.resize(rows, dim);
  ds.errors.resize(rows, n_models);
  ds.targets.resize(rows);
  ds.sample_index.reserve(rows);
  ds.grid_index.reserve(rows);

  Eigen::Index r = 0;
  std::vector<int> pool(points);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    for (int k = 0; k < points; ++k) pool[k] = k;
    for (int k = 0; k < per_fn; ++k) std::swap(pool[k], pool[k + static_cast<int>(rng.below(points - k))]);
    const auto& sample = samples[s];
    for (int k = 0; k < per_fn; ++k, ++r) {
      const int i = pool[k] / ref.ny, j = pool[k] % ref.ny;
      ds.features.row(r) = featurize(sample.input, sample.model_fields, i, j);
      const double y = sample.truth.at(i, j);
      ds.targets[r] = y;
      for (int m = 0; m < n_models; ++m) ds.errors(r, m) = sample.model_fields[m].at(i, j) - y;
      ds.sample_index.push_back(static_cast<int>(s));
      ds.grid_index.push_back(pool[k]);
    }
  }
  return ds;
}

Matrix OperatorAggregate::standardize(const Matrix& raw) const {
  Matrix out = raw.array().asinh();
  out.rowwise() -= feat_mean.transpose();
  out.array().rowwise() /= feat_scale.transpose().array();
  return out;
}

OperatorAggregate fit_operator_meva(const OperatorDataset& ds, const KernelSpec& spec, double reg,
                                    int anchor_budget, Rng& rng) {
  if (ds.count() == 0) throw InvalidInput("fit_operator_meva: empty dataset");
  OperatorAggregate agg;
  agg.n_models = static_cast<int>(ds.errors.cols());
  const Matrix compressed = ds.features.array().asinh();
  agg.feat_mean = compressed.colwise().mean();
  Vector var = (compressed.rowwise() - agg.feat_mean.transpose()).array().square().colwise().mean();
  agg.feat_scale = var.array().sqrt().max(1e-12);

  Matrix feats = agg.standardize(ds.features);
  Matrix errors = ds.errors;
  Vector targets = ds.targets;
  if (ds.count() > anchor_budget) {
    std::vector<int> pool(ds.count());
    for (Eigen::Index k = 0; k < ds.count(); ++k) pool[k] = static_cast<int>(k);
    for (int k = 0; k < anchor_budget; ++k) std::swap(pool[k], pool[k + static_cast<int>(rng.below(pool.size() - k))]);
    Matrix f2(anchor_budget, feats.cols());
    Matrix e2(anchor_budget, errors.cols());
    Vector t2(anchor_budget);
    for (int k = 0; k < anchor_budget; ++k) {
      f2.row(k) = feats.row(pool[k]);
      e2.row(k) = errors.row(pool[k]);
      t2[k] = targets[pool[k]];
    }
    feats = std::move(f2);
    errors = std::move(e2);
    targets = std::move(t2);
  }

  KernelSpec used = spec;
  if (used.lengthscale <= 0.0) used.lengthscale = median_lengthscale(feats);
  const Matrix model_values = errors.colwise() + targets;
  ErrorSamples samples;
  samples.inputs = feats;
  samples.errors = errors;
  samples.targets = targets;
  samples.model_values = model_values;
  agg.meva = fit_meva_sharp(samples, used, reg, Matrix(), /*center_targets=*/true);
  return agg;
}

OperatorPrediction predict_operator(const OperatorAggregate& agg, const GridFunction& input,
                                    const std::vector<GridFunction>& model_fields) {
  if (static_cast<int>(model_fields.size()) != agg.n_models) throw InvalidInput("predict_operator: bank size mismatch");
  const GridFunction& ref = model_fields.front();
  const int points = ref.nx * ref.ny;
  Matrix feats(points, agg.feat_mean.size());
  for (int p = 0; p < points; ++p) feats.row(p) = featurize(input, model_fields, p / ref.ny, p % ref.ny);
  const Matrix lam = krr_predict_many(agg.meva.log_var_model, agg.standardize(feats));

  OperatorPrediction out;
  out.aggregate = GridFunction(ref.nx, ref.ny, ref.domain);
  out.weight_fields.assign(agg.n_models, GridFunction(ref.nx, ref.ny, ref.domain));
  for (int p = 0; p < points; ++p) {
    const Vector w = softmax_weights(lam.row(p));
    double acc = 0.0;
    for (int m = 0; m < agg.n_models; ++m) {
      out.weight_fields[m].values[p] = w[m];
      acc += w[m] * model_fields[m].values[p];
    }
    out.aggregate.values[p] = acc;
  }
  return out;
}

double geometric_mean_log10_mse(const std::vector<double>& per_sample_mse) {
  if (per_sample_mse.empty()) throw InvalidInput("geometric_mean_log10_mse: empty input");
  double acc = 0.0;
  for (double v : per_sample_mse) acc += std::log10(std::max(v, 1e-300));
  return acc / static_cast<double>(per_sample_mse.size());
}

double grid_mse(const GridFunction& a, const GridFunction& b) {
  if (a.values.size() != b.values.size()) throw InvalidInput("grid_mse: shape mismatch");
  return (a.values - b.values).squaredNorm() / static_cast<double>(a.values.size());
}

}  // namespace meva
