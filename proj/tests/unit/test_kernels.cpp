#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "meva/kernels.hpp"
#include "meva/rng.hpp"

using namespace meva;

namespace {

Matrix random_points(Rng& rng, int n, int d) {
  Matrix x(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = rng.normal();
  return x;
}

}  // namespace

TEST_CASE("kernel_eval basics") {
  Vector u(3);
  u << 0.3, -1.0, 2.0;
  for (auto fam : {KernelFamily::matern32, KernelFamily::rbf}) {
    KernelSpec spec{fam, 0.7};
    CHECK(kernel_eval(spec, u, u) == doctest::Approx(1.0).epsilon(1e-15));
  }

  KernelSpec es{KernelFamily::expsin2, 1.5};
  Vector a(1), b(1);
  a << 0.37;
  b << 1.37;
  CHECK(kernel_eval(es, a, b) == doctest::Approx(1.0).epsilon(1e-12));  // period-1 invariance
  b << 0.25;
  a << 0.0;
  // exp(-2 sin^2(pi/4) / 1.5^2) = exp(-4/9), checked against direct arithmetic
  CHECK(kernel_eval(es, a, b) == doctest::Approx(std::exp(-4.0 / 9.0)).epsilon(1e-12));

  Vector v2(2);
  v2 << 0.0, 0.0;
  CHECK_THROWS_AS(kernel_eval(es, v2, v2), InvalidInput);
  Vector u3(3), w2(2);
  u3.setZero();
  w2.setZero();
  CHECK_THROWS_AS(kernel_eval(KernelSpec{KernelFamily::rbf, 1.0}, u3, w2), InvalidInput);
  CHECK_THROWS_AS(kernel_eval(KernelSpec{KernelFamily::rbf, -1.0}, u3, u3), InvalidInput);
}

TEST_CASE("kernel symmetry and boundedness") {
  Rng rng(5);
  for (auto fam : {KernelFamily::matern32, KernelFamily::rbf}) {
    KernelSpec spec{fam, 1.3};
    for (int rep = 0; rep < 100; ++rep) {
      const Matrix x = random_points(rng, 2, 4);
      const double kij = kernel_eval(spec, x.row(0), x.row(1));
      const double kji = kernel_eval(spec, x.row(1), x.row(0));
      CHECK(kij == kji);
      CHECK(std::abs(kij) <= 1.0);
    }
  }
}

TEST_CASE("gram properties") {
  Rng rng(13);
  KernelSpec spec{KernelFamily::matern32, 1.0};
  Matrix x1(1, 2);
  x1 << 0.1, 0.2;
  const Matrix g1 = gram(spec, x1, x1);
  CHECK(g1.rows() == 1);
  CHECK(g1(0, 0) == doctest::Approx(1.0));

  const Matrix x = random_points(rng, 20, 3);
  const Matrix g = gram(spec, x, x);
  Eigen::SelfAdjointEigenSolver<Matrix> es(g);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10);

  const Matrix x2 = random_points(rng, 7, 3);
  const Matrix gab = gram(spec, x, x2);
  const Matrix gba = gram(spec, x2, x);
  CHECK((gab - gba.transpose()).cwiseAbs().maxCoeff() < 1e-15);

  // gram agrees with pointwise kernel_eval
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      CHECK(gab(i, j) == doctest::Approx(kernel_eval(spec, x.row(i), x2.row(j))).epsilon(1e-14));
}

TEST_CASE("krr interpolation") {
  KernelSpec spec{KernelFamily::matern32, 0.8};
  Matrix x(1, 1);
  x << 0.4;
  Matrix y(1, 1);
  y << -2.5;
  KrrModel m = krr_fit(x, y, spec, 0.0);
  CHECK(krr_predict(m, x.row(0))[0] == doctest::Approx(-2.5).epsilon(1e-10));

  Matrix x2(2, 1), y2(2, 1);
  x2 << 0.0, 1.0;
  y2 << 1.0, -1.0;
  m = krr_fit(x2, y2, spec, 0.0);
  CHECK(krr_predict(m, x2.row(0))[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(krr_predict(m, x2.row(1))[0] == doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("krr two-point rbf against hand-solved system") {
  // x = 0, 1; y = 0, 1; rho = 1; reg 0.1 per sample so the system is K + 0.2 I
  KernelSpec spec{KernelFamily::rbf, 1.0};
  Matrix x(2, 1), y(2, 1);
  x << 0.0, 1.0;
  y << 0.0, 1.0;
  const KrrModel m = krr_fit(x, y, spec, 0.1);

  const double k01 = std::exp(-0.5);
  // 2x2 inverse of [[1.2, k01], [k01, 1.2]]
  const double det = 1.2 * 1.2 - k01 * k01;
  const double c0 = (1.2 * 0.0 - k01 * 1.0) / det;
  const double c1 = (-k01 * 0.0 + 1.2 * 1.0) / det;
  const double expected_at_0 = 1.0 * c0 + k01 * c1;
  CHECK(krr_predict(m, x.row(0))[0] == doctest::Approx(expected_at_0).epsilon(1e-12));
}

TEST_CASE("krr dense recomputation on a random instance") {
  Rng rng(21);
  KernelSpec spec{KernelFamily::rbf, 1.5};
  const Matrix x = random_points(rng, 12, 2);
  Matrix y(12, 2);
  for (int i = 0; i < 12; ++i) {
    y(i, 0) = rng.normal();
    y(i, 1) = rng.normal();
  }
  const double reg = 0.05;
  const KrrModel m = krr_fit(x, y, spec, reg);
  Matrix k = gram(spec, x, x);
  k.diagonal().array() += reg * 12;
  const Matrix coef = k.inverse() * y;
  const Matrix q = random_points(rng, 4, 2);
  const Matrix pred = krr_predict_many(m, q);
  const Matrix direct = gram(spec, q, x) * coef;
  CHECK((pred - direct).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("krr interpolates when the Gram system is well conditioned") {
  Rng rng(31);
  KernelSpec spec{KernelFamily::matern32, 1.0};
  const Matrix x = random_points(rng, 15, 2);
  Matrix y(15, 1);
  for (int i = 0; i < 15; ++i) y(i, 0) = rng.normal();
  const Matrix k = gram(spec, x, x);
  Eigen::JacobiSVD<Matrix> svd(k);
  const double cond = svd.singularValues()(0) / svd.singularValues()(14);
  if (cond < 1e12) {
    const KrrModel m = krr_fit(x, y, spec, 0.0);
    const Matrix pred = krr_predict_many(m, x);
    CHECK((pred - y).norm() <= 1e-8 * y.norm());
  }
}

TEST_CASE("centered krr shrinks toward the target mean") {
  KernelSpec spec{KernelFamily::rbf, 1.0};
  Matrix x(3, 1), y(3, 1);
  x << 0.0, 0.5, 1.0;
  y << 2.0, 4.0, 6.0;
  const KrrModel m = krr_fit(x, y, spec, 1e6);  // heavy shrinkage
  Vector far(1);
  far << 100.0;
  CHECK(krr_predict(m, far)[0] == doctest::Approx(0.0).epsilon(1e-6));
  const KrrModel mc = krr_fit(x, y, spec, 1e6, true);
  CHECK(krr_predict(mc, far)[0] == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("median_lengthscale") {
  Matrix x(3, 1);
  x << 0.0, 1.0, 2.0;
  // pairwise distances 1, 1, 2
  CHECK(median_lengthscale(x) == doctest::Approx(1.0));
}

TEST_CASE("meea_closed_form reduces to plain krr for a single constant model") {
  Rng rng(17);
  KernelSpec spec{KernelFamily::rbf, 1.0};
  const Matrix x = random_points(rng, 8, 1);
  Vector y(8);
  for (int i = 0; i < 8; ++i) y[i] = rng.normal();
  const Matrix ones = Matrix::Ones(8, 1);
  const MeeaModel meea = meea_closed_form(x, y, ones, spec, 0.01);
  const KrrModel krr = krr_fit(x, y, spec, 0.01);
  for (int i = 0; i < 8; ++i) {
    Vector m1(1);
    m1 << 1.0;
    CHECK(meea.predict(x.row(i), m1) == doctest::Approx(krr_predict(krr, x.row(i))[0]).epsilon(1e-10));
  }
}

TEST_CASE("meea_closed_form matches an independently assembled dense solve") {
  Rng rng(23);
  KernelSpec spec{KernelFamily::matern32, 1.2};
  const int n = 5, models = 3;
  const Matrix x = random_points(rng, n, 2);
  Matrix mv(n, models);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    y[i] = rng.normal();
    for (int j = 0; j < models; ++j) mv(i, j) = rng.normal();
  }
  const double reg = 0.02;
  const MeeaModel meea = meea_closed_form(x, y, mv, spec, reg);

  // dense oracle: k~(a,b) = k(a,b) (M(a) . M(b)), predictor k~(x,X)(k~ + reg N I)^{-1} Y
  Matrix kt(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      kt(i, j) = kernel_eval(spec, x.row(i), x.row(j)) * mv.row(i).dot(mv.row(j));
  kt.diagonal().array() += reg * n;
  const Vector coef = kt.inverse() * y;

  Rng rng2(24);
  for (int t = 0; t < 4; ++t) {
    Vector q(2), mq(models);
    q << rng2.normal(), rng2.normal();
    for (int j = 0; j < models; ++j) mq[j] = rng2.normal();
    double direct = 0;
    for (int i = 0; i < n; ++i) direct += coef[i] * kernel_eval(spec, q, x.row(i)) * mq.dot(mv.row(i));
    CHECK(meea.predict(q, mq) == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("meea_closed_form interpolates as reg -> 0") {
  Rng rng(29);
  KernelSpec spec{KernelFamily::rbf, 0.9};
  const int n = 6;
  const Matrix x = random_points(rng, n, 1);
  Matrix mv(n, 2);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    y[i] = rng.normal();
    mv(i, 0) = rng.normal() + 1.0;
    mv(i, 1) = rng.normal() - 1.0;
  }
  const MeeaModel meea = meea_closed_form(x, y, mv, spec, 1e-12);
  for (int i = 0; i < n; ++i)
    CHECK(meea.predict(x.row(i), mv.row(i)) == doctest::Approx(y[i]).epsilon(1e-6));
}

TEST_CASE("meea predictor homogeneity in a common rescaling") {
  Rng rng(37);
  KernelSpec spec{KernelFamily::matern32, 1.0};
  const int n = 6;
  const Matrix x = random_points(rng, n, 1);
  Matrix mv(n, 2);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    y[i] = rng.normal();
    mv(i, 0) = rng.normal();
    mv(i, 1) = rng.normal();
  }
  const double c = 3.7;
  // the regularizer must rescale with the kernel magnitude k~ ~ c^2 for exact
  // homogeneity of the closed form
  const MeeaModel base = meea_closed_form(x, y, mv, spec, 1e-3);
  const MeeaModel scaled = meea_closed_form(x, c * y, Matrix(c * mv), spec, 1e-3 * c * c);
  Vector q(1), mq(2);
  q << 0.123;
  mq << 0.4, -0.9;
  CHECK(scaled.predict(q, Vector(c * mq)) == doctest::Approx(c * base.predict(q, mq)).epsilon(1e-10));
}
