#include "meva/tabular.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "meva/grid.hpp"
#include "meva/train.hpp"

namespace meva {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // trim whitespace and a trailing CR
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

bool parse_num(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto res = std::from_chars(begin, end, v);
  return res.ec == std::errc() && res.ptr == end && std::isfinite(v);
}

}  // namespace

TabularDataset load_csv(const std::string& path, const std::string& target_column) {
  std::ifstream in(path);
  if (!in) throw IoError("load_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("load_csv: empty file " + path);
  const auto header = split_line(line);
  int target_idx = -1;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == target_column) target_idx = static_cast<int>(i);
  if (target_idx < 0) throw MissingColumn("load_csv: column '" + target_column + "' not found");

  std::vector<std::vector<double>> rows;
  int dropped = 0;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != header.size())
      throw ParseError("load_csv: row " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                       " cells, expected " + std::to_string(header.size()));
    std::vector<double> vals(cells.size());
    bool ok = true;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_num(cells[c], vals[c])) {
        ok = false;
        break;
      }
    }
    if (!ok) {
      ++dropped;
      continue;
    }
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw ParseError("load_csv: no usable rows in " + path);

  TabularDataset ds;
  ds.dropped_rows = dropped;
  ds.target_name = target_column;
  const int d = static_cast<int>(header.size()) - 1;
  ds.features.resize(static_cast<Eigen::Index>(rows.size()), d);
  ds.targets.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t c = 0; c < header.size(); ++c)
    if (static_cast<int>(c) != target_idx) ds.feature_names.push_back(header[c]);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    int fc = 0;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (static_cast<int>(c) == target_idx) ds.targets[static_cast<Eigen::Index>(r)] = rows[r][c];
      else ds.features(static_cast<Eigen::Index>(r), fc++) = rows[r][c];
    }
  }
  return ds;
}

namespace {

TabularDataset take_rows(const TabularDataset& ds, const std::vector<int>& idx) {
  TabularDataset out;
  out.feature_names = ds.feature_names;
  out.target_name = ds.target_name;
  out.features.resize(static_cast<Eigen::Index>(idx.size()), ds.features.cols());
  out.targets.resize(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = ds.features.row(idx[i]);
    out.targets[static_cast<Eigen::Index>(i)] = ds.targets[idx[i]];
  }
  return out;
}

}  // namespace

SplitResult split(const TabularDataset& ds, double train_ratio, double val_ratio, double test_ratio, Rng& rng) {
  if (std::abs(train_ratio + val_ratio + test_ratio - 1.0) > 1e-9)
    throw InvalidInput("split: ratios must sum to 1");
  const int n = static_cast<int>(ds.count());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int k = 0; k < n - 1; ++k) std::swap(idx[k], idx[k + static_cast<int>(rng.below(n - k))]);
  const int n_train = static_cast<int>(std::lround(train_ratio * n));
  const int n_val = static_cast<int>(std::lround(val_ratio * n));
  SplitResult out;
  out.train = take_rows(ds, {idx.begin(), idx.begin() + n_train});
  out.val = take_rows(ds, {idx.begin() + n_train, idx.begin() + std::min(n, n_train + n_val)});
  out.test = take_rows(ds, {idx.begin() + std::min(n, n_train + n_val), idx.end()});
  return out;
}

Standardizer Standardizer::fit(const Matrix& x) {
  Standardizer s;
  s.mean = x.colwise().mean();
  Vector var = (x.rowwise() - s.mean.transpose()).array().square().colwise().mean();
  s.scale = var.array().sqrt().max(1e-12);
  return s;
}

Matrix Standardizer::transform(const Matrix& x) const {
  Matrix out = x.rowwise() - mean.transpose();
  out.array().rowwise() /= scale.transpose().array();
  return out;
}

namespace {

class RidgeLearner final : public BaseLearner {
public:
  explicit RidgeLearner(double reg) : reg_(reg) {}
  void fit(const Matrix& x, const Vector& y) override {
    if (x.rows() == 0) throw InvalidInput("ridge: empty split");
    std_ = Standardizer::fit(x);
    const Matrix xs = std_.transform(x);
    y_mean_ = y.mean();
    Matrix a = xs.transpose() * xs;
    a.diagonal().array() += reg_;
    beta_ = spd_solve(a, xs.transpose() * (y.array() - y_mean_).matrix());
  }
  Vector predict(const Matrix& x) const override {
    return (std_.transform(x) * beta_).array() + y_mean_;
  }
  std::string name() const override { return "ridge"; }

private:
  double reg_;
  Standardizer std_;
  Vector beta_;
  double y_mean_ = 0;
};

class KnnLearner final : public BaseLearner {
public:
  explicit KnnLearner(int k) : k_(k) {}
  void fit(const Matrix& x, const Vector& y) override {
    if (x.rows() == 0) throw InvalidInput("knn: empty split");
    std_ = Standardizer::fit(x);
    xs_ = std_.transform(x);
    y_ = y;
  }
  Vector predict(const Matrix& x) const override {
    const Matrix q = std_.transform(x);
    Vector out(q.rows());
    const int k = std::min<int>(k_, static_cast<int>(xs_.rows()));
    std::vector<std::pair<double, int>> dist(xs_.rows());
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      for (Eigen::Index j = 0; j < xs_.rows(); ++j)
        dist[j] = {(xs_.row(j) - q.row(i)).squaredNorm(), static_cast<int>(j)};
      std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
      double acc = 0.0;
      for (int j = 0; j < k; ++j) acc += y_[dist[j].second];
      out[i] = acc / k;
    }
    return out;
  }
  std::string name() const override { return "knn"; }

private:
  int k_;
  Standardizer std_;
  Matrix xs_;
  Vector y_;
};

/// Depth-limited regression tree grown greedily on exact splits.
struct TreeNode {
  int feature = -1;
  double threshold = 0;
  double value = 0;
  int left = -1, right = -1;
};

class RegressionTree {
public:
  void fit(const Matrix& x, const Vector& residual, int max_depth, int min_leaf) {
    nodes_.clear();
    std::vector<int> idx(x.rows());
    std::iota(idx.begin(), idx.end(), 0);
    build(x, residual, idx, 0, max_depth, min_leaf);
  }

  double predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
    int node = 0;
    while (nodes_[node].feature >= 0)
      node = row[nodes_[node].feature] <= nodes_[node].threshold ? nodes_[node].left : nodes_[node].right;
    return nodes_[node].value;
  }

private:
  int build(const Matrix& x, const Vector& r, std::vector<int>& idx, int depth, int max_depth, int min_leaf) {
    const int node_id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    double sum = 0;
    for (int i : idx) sum += r[i];
    nodes_[node_id].value = sum / static_cast<double>(idx.size());
    if (depth >= max_depth || static_cast<int>(idx.size()) < 2 * min_leaf) return node_id;

    // ties at zero gain still split (first feature wins) so parity-style
    // targets remain reachable by deeper levels
    double best_gain = -1e-12;
    int best_f = -1, best_pos = -1;
    double best_thresh = 0;
    std::vector<int> order(idx);
    std::vector<int> best_order;
    for (int f = 0; f < x.cols(); ++f) {
      std::sort(order.begin(), order.end(), [&](int a, int b) { return x(a, f) < x(b, f); });
      double left_sum = 0;
      const double total = sum;
      for (std::size_t p = 0; p + 1 < order.size(); ++p) {
        left_sum += r[order[p]];
        if (x(order[p], f) == x(order[p + 1], f)) continue;
        const int nl = static_cast<int>(p) + 1, nr = static_cast<int>(order.size()) - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double right_sum = total - left_sum;
        const double gain = left_sum * left_sum / nl + right_sum * right_sum / nr - total * total / order.size();
        if (gain > best_gain) {
          best_gain = gain;
          best_f = f;
          best_pos = nl;
          best_thresh = 0.5 * (x(order[p], f) + x(order[p + 1], f));
          best_order = order;
        }
      }
    }
    if (best_f < 0) return node_id;
    std::vector<int> left_idx(best_order.begin(), best_order.begin() + best_pos);
    std::vector<int> right_idx(best_order.begin() + best_pos, best_order.end());
    nodes_[node_id].feature = best_f;
    nodes_[node_id].threshold = best_thresh;
    const int l = build(x, r, left_idx, depth + 1, max_depth, min_leaf);
    nodes_[node_id].left = l;
    nodes_[node_id].right = build(x, r, right_idx, depth + 1, max_depth, min_leaf);
    return node_id;
  }

  std::vector<TreeNode> nodes_;
};

class GbtLearner final : public BaseLearner {
public:
  GbtLearner(int rounds, double shrinkage, int max_depth)
      : rounds_(rounds), shrinkage_(shrinkage), max_depth_(max_depth) {}
  void fit(const Matrix& x, const Vector& y) override {
    if (x.rows() == 0) throw InvalidInput("gbt: empty split");
    base_ = y.mean();
    trees_.clear();
    Vector residual = y.array() - base_;
    for (int round = 0; round < rounds_; ++round) {
      RegressionTree tree;
      tree.fit(x, residual, max_depth_, 1);
      for (Eigen::Index i = 0; i < x.rows(); ++i) residual[i] -= shrinkage_ * tree.predict_row(x.row(i));
      trees_.push_back(std::move(tree));
    }
  }
  Vector predict(const Matrix& x) const override {
    Vector out = Vector::Constant(x.rows(), base_);
    for (const auto& tree : trees_)
      for (Eigen::Index i = 0; i < x.rows(); ++i) out[i] += shrinkage_ * tree.predict_row(x.row(i));
    return out;
  }
  std::string name() const override { return "gbt"; }

private:
  int rounds_;
  double shrinkage_;
  int max_depth_;
  double base_ = 0;
  std::vector<RegressionTree> trees_;
};

class KrrLearner final : public BaseLearner {
public:
  explicit KrrLearner(double reg) : reg_(reg) {}
  void fit(const Matrix& x, const Vector& y) override {
    if (x.rows() == 0) throw InvalidInput("krr: empty split");
    std_ = Standardizer::fit(x);
    const Matrix xs = std_.transform(x);
    KernelSpec spec{KernelFamily::matern32, median_lengthscale(xs)};
    model_ = krr_fit(xs, y, spec, reg_, /*center_targets=*/true);
  }
  Vector predict(const Matrix& x) const override { return krr_predict_many(model_, std_.transform(x)); }
  std::string name() const override { return "krr"; }

private:
  double reg_;
  Standardizer std_;
  KrrModel model_;
};

double mse(const Vector& pred, const Vector& truth) { return (pred - truth).squaredNorm() / pred.size(); }

}  // namespace

std::unique_ptr<BaseLearner> make_ridge(double reg) { return std::make_unique<RidgeLearner>(reg); }
std::unique_ptr<BaseLearner> make_knn(int k) { return std::make_unique<KnnLearner>(k); }
std::unique_ptr<BaseLearner> make_gbt(int rounds, double shrinkage, int max_depth) {
  return std::make_unique<GbtLearner>(rounds, shrinkage, max_depth);
}
std::unique_ptr<BaseLearner> make_krr(double reg) { return std::make_unique<KrrLearner>(reg); }

namespace {

std::vector<std::unique_ptr<BaseLearner>> default_bank() {
  std::vector<std::unique_ptr<BaseLearner>> bank;
  bank.push_back(make_ridge(1.0));
  bank.push_back(make_knn(5));
  bank.push_back(make_gbt(200, 0.05, 3));
  bank.push_back(make_krr(1e-2));
  return bank;
}

}  // namespace

TabularReport run_tabular_experiment(const TabularConfig& cfg) {
  const TabularDataset ds = load_csv(cfg.csv_path, cfg.target_column);
  TabularReport report;
  {
    auto bank = default_bank();
    for (auto& m : bank) report.model_names.push_back(m->name());
  }
  if (report.model_names.size() < 2) throw InvalidInput("run_tabular_experiment: need at least two base learners");

  double acc_meva = 0, acc_meea = 0, acc_direct = 0, acc_uniform = 0, acc_best_train = 0, acc_best_all = 0;
  for (int s = 0; s < cfg.n_splits; ++s) {
    Rng rng(cfg.seed + 1000003ULL * static_cast<std::uint64_t>(s));
    const SplitResult sp = split(ds, cfg.train_ratio, cfg.val_ratio, cfg.test_ratio, rng);
    TabularSplitReport rep;
    rep.split_seed = cfg.seed + 1000003ULL * static_cast<std::uint64_t>(s);
    rep.model_names = report.model_names;

    auto bank = default_bank();
    const int n_models = static_cast<int>(bank.size());
    Matrix val_pred(sp.val.count(), n_models), test_pred(sp.test.count(), n_models);
    for (int m = 0; m < n_models; ++m) {
      bank[m]->fit(sp.train.features, sp.train.targets);
      val_pred.col(m) = bank[m]->predict(sp.val.features);
      test_pred.col(m) = bank[m]->predict(sp.test.features);
      rep.train_model_mse.push_back(mse(test_pred.col(m), sp.test.targets));
    }
    // fairness baseline: same learners fitted on train+val
    {
      TabularDataset tv;
      tv.features.resize(sp.train.count() + sp.val.count(), ds.features.cols());
      tv.features << sp.train.features, sp.val.features;
      tv.targets.resize(sp.train.count() + sp.val.count());
      tv.targets << sp.train.targets, sp.val.targets;
      auto bank2 = default_bank();
      for (int m = 0; m < n_models; ++m) {
        bank2[m]->fit(tv.features, tv.targets);
        rep.trainval_model_mse.push_back(mse(bank2[m]->predict(sp.test.features), sp.test.targets));
      }
    }
    rep.mean_baseline_mse = mse(test_pred.rowwise().mean(), sp.test.targets);

    // aggregation features are the model output vectors M(x)
    const ErrorSamples samples = ErrorSamples::from_values(val_pred, val_pred, sp.val.targets);
    const KernelSpec kernel{KernelFamily::matern32, median_lengthscale(val_pred)};

    const MevaAggregator meva = fit_meva_sharp(samples, kernel, cfg.meva_reg, Matrix(), true);
    const MeeaModel meea = fit_meea(samples, kernel, cfg.meea_reg);
    const MevaAggregator direct = fit_direct_mva(samples, kernel, cfg.direct_reg, cfg.direct_steps, cfg.direct_lr);

    Vector meva_out(sp.test.count()), meea_out(sp.test.count()), direct_out(sp.test.count());
    for (Eigen::Index i = 0; i < sp.test.count(); ++i) {
      const Vector m_x = test_pred.row(i).transpose();
      meva_out[i] = meva.predict(m_x, m_x).second;
      meea_out[i] = meea.predict(m_x, m_x);
      direct_out[i] = direct.predict(m_x, m_x).second;
    }
    rep.meva_mse = mse(meva_out, sp.test.targets);
    rep.meea_mse = mse(meea_out, sp.test.targets);
    rep.direct_mse = mse(direct_out, sp.test.targets);

    const double best_train = *std::min_element(rep.train_model_mse.begin(), rep.train_model_mse.end());
    double best_all = best_train;
    for (double v : rep.trainval_model_mse) best_all = std::min(best_all, v);
    best_all = std::min(best_all, rep.mean_baseline_mse);

    acc_meva += rep.meva_mse;
    acc_meea += rep.meea_mse;
    acc_direct += rep.direct_mse;
    acc_uniform += rep.mean_baseline_mse;
    acc_best_train += best_train;
    acc_best_all += best_all;
    report.splits.push_back(std::move(rep));
  }
  const double inv = 1.0 / cfg.n_splits;
  report.mean_meva_mse = acc_meva * inv;
  report.mean_meea_mse = acc_meea * inv;
  report.mean_direct_mse = acc_direct * inv;
  report.mean_uniform_mse = acc_uniform * inv;
  report.mean_best_train_mse = acc_best_train * inv;
  report.mean_best_overall_mse = acc_best_all * inv;
  report.r_train = 1.0 - report.mean_meva_mse / report.mean_best_train_mse;
  report.r_all = 1.0 - report.mean_meva_mse / report.mean_best_overall_mse;
  return report;
}

void write_synthetic_regression_csv(const std::string& path, int rows, int features, std::uint64_t seed) {
  if (features < 5) throw InvalidInput("write_synthetic_regression_csv: need at least 5 features");
  Rng rng(seed);
  std::ofstream out(path);
  if (!out) throw IoError("write_synthetic_regression_csv: cannot open " + path);
  for (int f = 0; f < features; ++f) out << 'f' << f << ',';
  out << "target\n";
  const double pi = 3.14159265358979323846;
  // dense linear backbone plus smooth single-variable and interaction terms
  // sized so that no learner family dominates: the linear model misses the
  // nonlinearities, trees pay step noise on the dense linear part, and the
  // kernel model smooths both, which is the regime aggregation targets
  for (int r = 0; r < rows; ++r) {
    std::vector<double> x(features);
    for (int f = 0; f < features; ++f) x[f] = rng.uniform();
    double y = 0.0;
    for (int f = 0; f < features; ++f) {
      const double coef = (f % 3 == 0) ? 1.0 : (f % 3 == 1 ? -0.7 : 0.45);
      y += 4.0 * coef * x[f];
    }
    y += 3.2 * std::sin(2.0 * pi * x[4]);
    y += 3.5 * (x[5] - 0.5) * (x[5] - 0.5);
    y += 2.5 * x[0] * x[1];
    y += rng.normal(0.0, 0.3);
    for (int f = 0; f < features; ++f) out << format_double17(x[f]) << ',';
    out << format_double17(y) << '\n';
  }
}

}  // namespace meva
