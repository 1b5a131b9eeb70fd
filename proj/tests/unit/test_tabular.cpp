#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "meva/tabular.hpp"

using namespace meva;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("load_csv parses a handcrafted table exactly") {
  const std::string path = temp_path("meva_tab1.csv");
  {
    std::ofstream out(path);
    out << "a,b,target\n1,2,3\n4,5,6\n7,8,9\n";
  }
  const TabularDataset ds = load_csv(path, "target");
  REQUIRE(ds.count() == 3);
  CHECK(ds.features(0, 0) == 1.0);
  CHECK(ds.features(2, 1) == 8.0);
  CHECK(ds.targets[1] == 6.0);
  CHECK(ds.dropped_rows == 0);
  CHECK(ds.feature_names == std::vector<std::string>{"a", "b"});
  CHECK_THROWS_AS(load_csv(path, "missing"), MissingColumn);
  std::filesystem::remove(path);
}

TEST_CASE("load_csv drops rows with missing cells") {
  const std::string path = temp_path("meva_tab2.csv");
  {
    std::ofstream out(path);
    out << "a,target\n1,2\n,3\n4,5\n";
  }
  const TabularDataset ds = load_csv(path, "target");
  CHECK(ds.count() == 2);
  CHECK(ds.dropped_rows == 1);
  std::filesystem::remove(path);
}

TEST_CASE("synthetic csv round trips through the loader") {
  const std::string path = temp_path("meva_tab3.csv");
  write_synthetic_regression_csv(path, 50, 8, 42);
  const TabularDataset ds = load_csv(path, "target");
  CHECK(ds.count() == 50);
  CHECK(ds.features.cols() == 8);
  // writing and re-reading is bit exact at 17 significant digits
  const std::string path2 = temp_path("meva_tab3b.csv");
  write_synthetic_regression_csv(path2, 50, 8, 42);
  const TabularDataset ds2 = load_csv(path2, "target");
  CHECK((ds.features - ds2.features).cwiseAbs().maxCoeff() == 0.0);
  std::filesystem::remove(path);
  std::filesystem::remove(path2);
}

TEST_CASE("split covers the dataset and is seeded") {
  const std::string path = temp_path("meva_tab4.csv");
  write_synthetic_regression_csv(path, 101, 6, 1);
  const TabularDataset ds = load_csv(path, "target");
  Rng r1(5), r2(5);
  const SplitResult a = split(ds, 0.6, 0.2, 0.2, r1);
  const SplitResult b = split(ds, 0.6, 0.2, 0.2, r2);
  CHECK(a.train.count() + a.val.count() + a.test.count() == 101);
  CHECK(std::abs(static_cast<double>(a.train.count()) - 0.6 * 101) <= 1.0);
  CHECK(std::abs(static_cast<double>(a.val.count()) - 0.2 * 101) <= 1.0);
  CHECK((a.train.features - b.train.features).cwiseAbs().maxCoeff() == 0.0);

  Rng r3(6);
  const SplitResult all = split(ds, 1.0, 0.0, 0.0, r3);
  CHECK(all.train.count() == 101);
  CHECK(all.test.count() == 0);
  CHECK_THROWS_AS(split(ds, 0.5, 0.2, 0.2, r3), InvalidInput);
  std::filesystem::remove(path);
}

TEST_CASE("standardization statistics come from the training data") {
  Rng rng(9);
  Matrix x(40, 3);
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 3; ++j) x(i, j) = 5.0 * rng.normal() + j;
  const Standardizer st = Standardizer::fit(x);
  const Matrix xs = st.transform(x);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(xs.col(j).mean()) < 1e-10);
    CHECK(std::abs(std::sqrt(xs.col(j).squaredNorm() / 40.0) - 1.0) < 1e-10);
  }
}

TEST_CASE("ridge recovers exact linear data") {
  Rng rng(11);
  Matrix x(50, 3);
  Vector beta(3);
  beta << 2.0, -1.0, 0.5;
  Vector y(50);
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = rng.normal();
    y[i] = x.row(i).dot(beta) + 4.0;
  }
  auto ridge = make_ridge(0.0);
  ridge->fit(x, y);
  CHECK((ridge->predict(x) - y).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("knn with k = 1 predicts its own training targets") {
  Rng rng(13);
  Matrix x(20, 2);
  Vector y(20);
  for (int i = 0; i < 20; ++i) {
    x.row(i) << rng.normal(), rng.normal();
    y[i] = rng.normal();
  }
  auto knn = make_knn(1);
  knn->fit(x, y);
  CHECK((knn->predict(x) - y).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gbt training error is non-increasing and fits an xor pattern") {
  Matrix x(4, 2);
  x << 0, 0, 0, 1, 1, 0, 1, 1;
  Vector y(4);
  y << 0, 1, 1, 0;
  double prev = 1e300;
  for (int rounds : {5, 15, 50}) {
    auto gbt = make_gbt(rounds, 0.3, 3);
    gbt->fit(x, y);
    const double m = (gbt->predict(x) - y).squaredNorm() / 4.0;
    CHECK(m <= prev + 1e-12);
    prev = m;
  }
  CHECK(prev < 0.01);
}

TEST_CASE("tabular experiment orders methods and is reproducible") {
  const std::string path = temp_path("meva_tab5.csv");
  write_synthetic_regression_csv(path, 220, 8, 3);
  TabularConfig cfg;
  cfg.csv_path = path;
  cfg.target_column = "target";
  cfg.n_splits = 3;
  cfg.seed = 11;
  const TabularReport a = run_tabular_experiment(cfg);
  const TabularReport b = run_tabular_experiment(cfg);
  CHECK(a.mean_meva_mse == b.mean_meva_mse);  // bit-for-bit reproducible
  CHECK(a.mean_meea_mse == b.mean_meea_mse);
  CHECK(a.splits.size() == 3);
  CHECK(a.mean_meva_mse > 0.0);
  std::filesystem::remove(path);
}
