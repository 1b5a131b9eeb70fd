#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "meva/burgers.hpp"
#include "meva/gp_kernels.hpp"
#include "meva/kernels.hpp"
#include "meva/laplace.hpp"

using namespace meva;

namespace {

constexpr double kPi = 3.14159265358979323846;

GridFunction manufactured_f(int n) {
  // f = 2 pi^2 sin(pi x) sin(pi y), the source whose solution is sin sin
  GridFunction f(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      f.at(i, j) = 2.0 * kPi * kPi * std::sin(kPi * i / (n - 1.0)) * std::sin(kPi * j / (n - 1.0));
  return f;
}

double max_err_vs_sinsin(const GridFunction& u) {
  double err = 0;
  for (int i = 0; i < u.nx; ++i)
    for (int j = 0; j < u.ny; ++j)
      err = std::max(err, std::abs(u.at(i, j) - std::sin(kPi * i / (u.nx - 1.0)) * std::sin(kPi * j / (u.ny - 1.0))));
  return err;
}

}  // namespace

TEST_CASE("grid io round trip is bit exact") {
  Rng rng(1);
  GridFunction g(5, 3);
  for (Eigen::Index i = 0; i < g.values.size(); ++i) g.values[i] = rng.normal() * std::pow(10.0, rng.normal() * 5);
  g.values[0] = 1e-300;
  g.values[1] = -0.0;
  const std::string path = (std::filesystem::temp_directory_path() / "meva_grid_test.grid").string();
  write_grid(g, path);
  const GridFunction h = read_grid(path);
  REQUIRE(h.nx == g.nx);
  REQUIRE(h.ny == g.ny);
  for (Eigen::Index i = 0; i < g.values.size(); ++i) CHECK(h.values[i] == g.values[i]);
  std::filesystem::remove(path);
}

TEST_CASE("clamp_field") {
  GridFunction g(2, 2);
  g.values << 0.5, 2e6, -3e6, std::nan("");
  CHECK(clamp_field(g));
  CHECK(g.values[0] == 0.5);
  CHECK(g.values[1] == 1e6);
  CHECK(g.values[2] == -1e6);
  CHECK(g.values[3] == 1e6);
}

TEST_CASE("laplace sample analytic properties") {
  LaplaceParams p;
  p.f_max = 3.7;
  p.mu0 = 0.43;
  p.mu1 = 0.61;
  p.r << 12.0, 3.0, 3.0, 20.0;
  const LaplaceSample s = make_laplace_pair(p, 33, 33);
  // at the bump center the exponent vanishes
  CHECK(laplace_truth(p.mu0, p.mu1, p) ==
        doctest::Approx(-std::sin(kPi * p.mu0) * std::sin(kPi * p.mu1) * std::sin(p.f_max)).epsilon(1e-14));
  for (int i = 0; i < 33; ++i) {
    CHECK(s.u.at(i, 0) == 0.0);
    CHECK(s.u.at(i, 32) == 0.0);
    CHECK(s.u.at(0, i) == 0.0);
    CHECK(s.u.at(32, i) == 0.0);
  }
}

TEST_CASE("laplace rhs matches the analytic Laplacian in the degenerate limit") {
  // R = 0 makes u proportional to sin(pi x) sin(pi y), so f = 2 pi^2 u
  LaplaceParams p;
  p.f_max = 1.3;
  p.r.setZero();
  const LaplaceSample s = make_laplace_pair(p, 65, 65);
  double err = 0;
  for (int i = 0; i < 65; ++i)
    for (int j = 0; j < 65; ++j) err = std::max(err, std::abs(s.f.at(i, j) - 2.0 * kPi * kPi * s.u.at(i, j)));
  CHECK(err < 1e-6);
}

TEST_CASE("laplace_fdm zero source and manufactured convergence") {
  GridFunction zero(17, 17);
  const SolverResult r0 = laplace_fdm(zero, Grading::uniform);
  CHECK(r0.field.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK_FALSE(r0.diverged);

  double errs[3];
  const int grids[3] = {17, 33, 65};
  for (int k = 0; k < 3; ++k) errs[k] = max_err_vs_sinsin(laplace_fdm(manufactured_f(grids[k]), Grading::uniform).field);
  const double order1 = std::log2(errs[0] / errs[1]);
  const double order2 = std::log2(errs[1] / errs[2]);
  CHECK(order1 > 1.7);
  CHECK(order1 < 2.3);
  CHECK(order2 > 1.7);
  CHECK(order2 < 2.3);
}

TEST_CASE("laplace solvers are linear operators") {
  Rng rng(5);
  LaplaceParams p1, p2;
  p1.f_max = 2.0;
  p1.r << 10, 0, 0, 8;
  p2.f_max = 5.0;
  p2.mu0 = 0.3;
  p2.r << 25, 5, 5, 14;
  const int n = 33;
  const GridFunction f1 = make_laplace_pair(p1, n, n).f;
  const GridFunction f2 = make_laplace_pair(p2, n, n).f;
  GridFunction fsum(n, n);
  fsum.values = f1.values + f2.values;

  for (auto grading : {Grading::uniform, Grading::left_dense, Grading::right_dense}) {
    const Vector a = laplace_fdm(f1, grading).field.values;
    const Vector b = laplace_fdm(f2, grading).field.values;
    const Vector c = laplace_fdm(fsum, grading).field.values;
    CHECK((c - a - b).cwiseAbs().maxCoeff() <= 1e-9 * (a.cwiseAbs().maxCoeff() + b.cwiseAbs().maxCoeff()));
  }
  {
    const Vector a = laplace_spectral(f1).field.values;
    const Vector b = laplace_spectral(f2).field.values;
    const Vector c = laplace_spectral(fsum).field.values;
    CHECK((c - a - b).cwiseAbs().maxCoeff() <= 1e-9 * (a.cwiseAbs().maxCoeff() + b.cwiseAbs().maxCoeff()));
  }
  {
    // identical seeds give identical collocation points, so the GP solve is
    // linear in the data
    Rng ra(77), rb(77), rc(77);
    const Vector a = laplace_gp(f1, 120, 0.2, ra).field.values;
    const Vector b = laplace_gp(f2, 120, 0.2, rb).field.values;
    const Vector c = laplace_gp(fsum, 120, 0.2, rc).field.values;
    CHECK((c - a - b).cwiseAbs().maxCoeff() <= 1e-7 * (a.cwiseAbs().maxCoeff() + b.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("laplace_spectral single-mode exactness") {
  GridFunction zero(17, 17);
  CHECK(laplace_spectral(zero).field.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(max_err_vs_sinsin(laplace_spectral(manufactured_f(33)).field) < 1e-10);
  CHECK(max_err_vs_sinsin(laplace_spectral(manufactured_f(64)).field) < 1e-10);
}

TEST_CASE("laplace_gp zero data and psd collocation gram") {
  GridFunction zero(33, 33);
  Rng rng(9);
  const SolverResult r = laplace_gp(zero, 100, 0.2, rng);
  CHECK_FALSE(r.diverged);
  CHECK(r.field.values.cwiseAbs().maxCoeff() < 1e-10);

  // symmetric PSD property of the extended kernel matrix on random points
  Rng rng2(10);
  const RbfPde kern(0.25);
  const int m = 24, half = 12;
  Matrix pts(m, 2);
  for (int i = 0; i < m; ++i) pts.row(i) << rng2.uniform(), rng2.uniform();
  Matrix k(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double s = sqdist2(pts(i, 0), pts(i, 1), pts(j, 0), pts(j, 1));
      if (i < half && j < half) k(i, j) = kern.neg_lap_both(s);
      else if (i >= half && j >= half) k(i, j) = kern.value(s);
      else k(i, j) = kern.neg_lap(s);
    }
  CHECK((k - k.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Matrix> es(k);
  CHECK(es.eigenvalues().minCoeff() > -1e-6 * es.eigenvalues().maxCoeff());
}

TEST_CASE("laplace_gp two regimes in f_max") {
  Rng rng(21);
  std::vector<double> low, high;
  for (int rep = 0; rep < 6; ++rep) {
    LaplaceParams p;
    p.mu0 = rng.uniform(0.3, 0.7);
    p.mu1 = rng.uniform(0.3, 0.7);
    p.r << rng.uniform(8, 20), 0, 0, rng.uniform(8, 20);
    p.f_max = rng.uniform(1.0, 2.5);
    const LaplaceSample easy = make_laplace_pair(p, 48, 48);
    p.f_max = rng.uniform(7.5, 10.0);
    const LaplaceSample hard = make_laplace_pair(p, 48, 48);
    Rng ra(100 + rep), rb(100 + rep);
    const GridFunction ue = laplace_gp(easy.f, 300, 0.2, ra).field;
    const GridFunction uh = laplace_gp(hard.f, 300, 0.2, rb).field;
    low.push_back((ue.values - easy.u.values).squaredNorm() / ue.values.size());
    high.push_back((uh.values - hard.u.values).squaredNorm() / uh.values.size());
  }
  std::sort(low.begin(), low.end());
  std::sort(high.begin(), high.end());
  CHECK(low[3] < high[3]);  // median comparison
}

TEST_CASE("burgers ic sampler moments, periodicity and determinism") {
  Rng a(5), b(5);
  const GridFunction u1 = sample_burgers_ic(a, 64);
  const GridFunction u2 = sample_burgers_ic(b, 64);
  CHECK((u1.values - u2.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(sample_burgers_ic(a, 16), InvalidInput);

  // the kernel is exactly period 1: K(x, x+1) = 1
  KernelSpec es{KernelFamily::expsin2, 1.5};
  Vector p1(1), p2(1);
  p1 << 0.0;
  p2 << 1.0;
  CHECK(kernel_eval(es, p1, p2) == doctest::Approx(1.0).epsilon(1e-14));

  Rng rng(31);
  double acc = 0;
  const int draws = 2000;
  for (int t = 0; t < draws; ++t) {
    const GridFunction u = sample_burgers_ic(rng, 32);
    acc += u.values[7] * u.values[7];
  }
  CHECK(acc / draws == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("constant initial data is a fixed point of all seven schemes") {
  GridFunction u0(64, 1);
  u0.values.setConstant(0.7);
  for (auto scheme : {BurgersScheme::explicit_fd, BurgersScheme::implicit_fd, BurgersScheme::lax_wendroff,
                      BurgersScheme::spectral, BurgersScheme::fvm, BurgersScheme::tvd, BurgersScheme::riemann}) {
    const SolverResult r = burgers_solve(u0, scheme, 2e-3, 65);
    CHECK_FALSE(r.diverged);
    CHECK((r.field.values.array() - 0.7).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("conservative schemes conserve mass") {
  Rng rng(41);
  const GridFunction u0 = sample_burgers_ic(rng, 128);
  for (auto scheme : {BurgersScheme::fvm, BurgersScheme::tvd, BurgersScheme::riemann}) {
    const SolverResult r = burgers_solve(u0, scheme, 2e-3, 513);
    REQUIRE_FALSE(r.diverged);
    const double m0 = r.field.values.reshaped(513, 128).row(0).sum() / 128.0;
    for (int t = 0; t < 513; t += 64) {
      double mt = 0;
      for (int i = 0; i < 128; ++i) mt += r.field.at(i, t);
      CHECK(std::abs(mt / 128.0 - m0) < 1e-8);
    }
  }
}

TEST_CASE("riemann scheme is monotone") {
  Rng rng(43);
  for (int rep = 0; rep < 3; ++rep) {
    const GridFunction u0 = sample_burgers_ic(rng, 64);
    const SolverResult r = burgers_solve(u0, BurgersScheme::riemann, 0.0, 513);
    REQUIRE_FALSE(r.diverged);
    const double lo = u0.values.minCoeff(), hi = u0.values.maxCoeff();
    CHECK(r.field.values.minCoeff() >= lo - 1e-10);
    CHECK(r.field.values.maxCoeff() <= hi + 1e-10);
  }
}

TEST_CASE("viscous schemes agree with the refined reference on smooth data") {
  const int nx = 128, nt = 385;
  GridFunction u0(nx, 1);
  for (int i = 0; i < nx; ++i) u0.values[i] = 0.1 * std::sin(2.0 * kPi * i / nx);
  const GridFunction ref = burgers_reference(u0, 2e-3, 4096, 12289, nt);
  for (auto scheme : {BurgersScheme::explicit_fd, BurgersScheme::implicit_fd, BurgersScheme::lax_wendroff,
                      BurgersScheme::spectral, BurgersScheme::fvm, BurgersScheme::tvd}) {
    const SolverResult r = burgers_solve(u0, scheme, 2e-3, nt);
    REQUIRE_FALSE(r.diverged);
    double err = 0;
    for (int i = 0; i < nx; ++i) err = std::max(err, std::abs(r.field.at(i, nt - 1) - ref.at(i, nt - 1)));
    INFO(scheme_name(scheme));
    CHECK(err < 1e-2);
  }
}
