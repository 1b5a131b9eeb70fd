#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "meva/aggregate.hpp"
#include "meva/rng.hpp"

using namespace meva;

namespace {

// independent oracle: scan the constraint line alpha = (a, 1-a) on a grid
Vector brute_force_mva_2d(const Matrix& a, double step) {
  double best = 1e300, best_a = 0;
  for (double w = -2.0; w <= 3.0; w += step) {
    Vector alpha(2);
    alpha << w, 1.0 - w;
    const double val = alpha.dot(a * alpha);
    if (val < best) {
      best = val;
      best_a = w;
    }
  }
  Vector out(2);
  out << best_a, 1.0 - best_a;
  return out;
}

Matrix random_spd(Rng& rng, int n) {
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  Matrix a = g * g.transpose();
  a.diagonal().array() += 0.1;
  return a;
}

}  // namespace

TEST_CASE("mva_weights closed-form cases") {
  CHECK((mva_weights(Matrix::Identity(2, 2)) - Vector::Constant(2, 0.5)).cwiseAbs().maxCoeff() < 1e-12);

  Matrix diag14 = Vector(Eigen::Vector2d(1.0, 4.0)).asDiagonal();
  Vector w = mva_weights(diag14);
  CHECK(w[0] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(0.2).epsilon(1e-12));

  Matrix a(2, 2);
  a << 1.0, 0.5, 0.5, 2.0;
  w = mva_weights(a);
  const Vector oracle = brute_force_mva_2d(a, 1e-4);
  CHECK(std::abs(w[0] - 0.75) < 1e-10);
  CHECK(std::abs(w[1] - 0.25) < 1e-10);
  CHECK(std::abs(w[0] - oracle[0]) < 2e-4);
}

TEST_CASE("mva_weights errors") {
  CHECK_THROWS_AS(mva_weights(Matrix()), EmptyBank);
  Matrix bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;  // indefinite
  CHECK_THROWS_AS(mva_weights(bad), SingularCovariance);
}

TEST_CASE("mva_weights optimality over random candidates") {
  Rng rng(42);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 2 + static_cast<int>(rng.below(5));
    const Matrix a = random_spd(rng, n);
    const Vector w = mva_weights(a);
    CHECK(std::abs(w.sum() - 1.0) < 1e-10);
    const double opt = w.dot(a * w);
    for (int t = 0; t < 500; ++t) {
      Vector c(n);
      for (int i = 0; i < n; ++i) c[i] = rng.normal();
      c.array() += (1.0 - c.sum()) / n;
      CHECK(c.dot(a * c) >= opt - 1e-12);
    }
  }
}

TEST_CASE("softmax_weights") {
  CHECK((softmax_weights(Vector::Zero(3)) - Vector::Constant(3, 1.0 / 3.0)).cwiseAbs().maxCoeff() < 1e-15);

  Vector lv(2);
  lv << std::log(1.0), std::log(4.0);
  Vector w = softmax_weights(lv);
  CHECK(w[0] == doctest::Approx(0.8).epsilon(1e-12));

  // matches mva on the diagonal covariance within 1e-12
  const Vector via_mva = mva_weights(Matrix(lv.array().exp().matrix().asDiagonal()));
  CHECK((w - via_mva).cwiseAbs().maxCoeff() < 1e-12);

  Vector extreme(2);
  extreme << 0.0, 1000.0;
  w = softmax_weights(extreme);
  CHECK(w[0] == 1.0);
  CHECK(w[1] == 0.0);

  Vector nan_in(2);
  nan_in << 0.0, std::nan("");
  CHECK_THROWS_AS(softmax_weights(nan_in), InvalidInput);
}

TEST_CASE("softmax shift invariance") {
  Rng rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    Vector lv(4);
    for (int i = 0; i < 4; ++i) lv[i] = 10.0 * rng.normal();
    const double c = 50.0 * rng.normal();
    const Vector base = softmax_weights(lv);
    const Vector shifted = softmax_weights(lv.array() + c);
    CHECK((base - shifted).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("rotated_weights identity and permutation") {
  Vector lv(2);
  lv << 0.0, std::log(4.0);
  CovarianceModel id{lv, Matrix()};
  Vector w = rotated_weights(id);
  CHECK(w[0] == doctest::Approx(0.8).epsilon(1e-12));

  // permutation swapping coordinates with swapped log-vars gives the same weights
  Matrix p(2, 2);
  p << 0, 1, 1, 0;
  Vector swapped(2);
  swapped << std::log(4.0), 0.0;
  const Vector wp = rotated_weights({swapped, p});
  CHECK(wp[0] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(wp[1] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("rotated_weights 45-degree case matches dense oracle") {
  const double c = std::sqrt(0.5);
  Matrix p(2, 2);
  p << c, -c, c, c;
  Vector lv(2);
  lv << 0.0, std::log(4.0);
  const Vector w = rotated_weights({lv, p});
  // independent route: reconstruct A = P^T D P densely and call mva_weights
  const Matrix a = p.transpose() * Matrix(lv.array().exp().matrix().asDiagonal()) * p;
  const Vector oracle = mva_weights(a);
  CHECK((w - oracle).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(std::abs(w.sum() - 1.0) < 1e-12);
}

TEST_CASE("rotated_weights equals softmax for identity basis on random draws") {
  Rng rng(11);
  for (int rep = 0; rep < 1000; ++rep) {
    Vector lv(3);
    for (int i = 0; i < 3; ++i) lv[i] = 5.0 * rng.normal();
    const Vector a = rotated_weights({lv, Matrix::Identity(3, 3)});
    const Vector b = softmax_weights(lv);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("rotated_weights degenerate rotation") {
  const double c = std::sqrt(0.5);
  Matrix p(2, 2);
  p << c, c, c, -c;  // P 1 = (sqrt(2), 0)
  Vector lv(2);
  lv << 800.0, 0.0;  // exp(-800) underflows, so 1^T P^T D P 1 = 0
  CHECK_THROWS_AS(rotated_weights({lv, p}), DegenerateRotation);
}

TEST_CASE("mea_weights identity moments") {
  SecondMoments m;
  m.c = Matrix::Identity(2, 2);
  m.gamma = Vector(2);
  m.gamma << 1.0, 0.0;
  const Vector w = mea_weights(m);
  CHECK(w[0] == doctest::Approx(1.0));
  CHECK(w[1] == doctest::Approx(0.0));
}

TEST_CASE("mea_weights matches Monte-Carlo least squares") {
  // known joint law: Y ~ N(0,1), M = (Y + e1, 0.5 Y + e2), e_i ~ N(0, 0.1)
  // C and gamma in closed form; the empirical minimizer over many samples
  // must agree within Monte-Carlo error
  Rng rng(3);
  const int n_draws = 1000000;
  Matrix mtm = Matrix::Zero(2, 2);
  Vector mty = Vector::Zero(2);
  for (int i = 0; i < n_draws; ++i) {
    const double y = rng.normal();
    Vector m(2);
    m << y + std::sqrt(0.1) * rng.normal(), 0.5 * y + std::sqrt(0.1) * rng.normal();
    mtm += m * m.transpose();
    mty += m * y;
  }
  const Vector empirical = mtm.ldlt().solve(mty);

  SecondMoments mom;
  mom.c.resize(2, 2);
  mom.c << 1.1, 0.5, 0.5, 0.35;
  mom.gamma.resize(2);
  mom.gamma << 1.0, 0.5;
  const Vector w = mea_weights(mom);
  // three standard errors at N = 1e6 is roughly 3e-3 on each coefficient
  CHECK((w - empirical).cwiseAbs().maxCoeff() < 5e-3);
}

TEST_CASE("mea_weights satisfies the normal equations") {
  Rng rng(9);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng.below(4));
    const Matrix c = random_spd(rng, n);
    Vector g(n);
    for (int i = 0; i < n; ++i) g[i] = rng.normal();
    const Vector w = mea_weights({c, g});
    CHECK((c * w - g).norm() <= 1e-8 * g.norm() + 1e-14);
  }
}

TEST_CASE("aggregate_pointwise") {
  Vector w(2), v(2);
  w << 1.0, 0.0;
  v << 3.7, -9.0;
  CHECK(aggregate_pointwise(w, v) == 3.7);

  Vector w3 = Vector::Constant(3, 1.0 / 3.0);
  Vector v3(3);
  v3 << 1.0, 2.0, 3.0;
  CHECK(aggregate_pointwise(w3, v3) == doctest::Approx(2.0).epsilon(1e-14));

  Vector w2(2), v2(2);
  w2 << 0.75, 0.25;
  v2 << 2.0, -2.0;
  CHECK(aggregate_pointwise(w2, v2) == doctest::Approx(1.0).epsilon(1e-14));

  CHECK_THROWS_AS(aggregate_pointwise(w2, v3), InvalidInput);
}
