#include "meva/laplace.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Sparse>

#include "meva/gp_kernels.hpp"

namespace meva {

namespace {

constexpr double kPi = 3.14159265358979323846;

double graded_x(double xi, Grading grading) {
  switch (grading) {
    case Grading::uniform: return xi;
    case Grading::left_dense: return std::pow(xi, 1.5);
    case Grading::right_dense: return 1.0 - std::pow(1.0 - xi, 1.5);
  }
  return xi;
}

double lerp_column(const GridFunction& g, const std::vector<double>& xs, double x, int j) {
  // linear interpolation along x at fixed column j
  if (x <= xs.front()) return g.at(0, j);
  if (x >= xs.back()) return g.at(g.nx - 1, j);
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const int hi = static_cast<int>(it - xs.begin());
  const int lo = hi - 1;
  const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return (1.0 - t) * g.at(lo, j) + t * g.at(hi, j);
}

}  // namespace

double laplace_truth(double x, double y, const LaplaceParams& p) {
  const double dx = x - p.mu0, dy = y - p.mu1;
  const double q = p.r(0, 0) * dx * dx + (p.r(0, 1) + p.r(1, 0)) * dx * dy + p.r(1, 1) * dy * dy;
  return -std::sin(kPi * x) * std::sin(kPi * y) * std::sin(p.f_max * std::exp(-q));
}

LaplaceSample make_laplace_pair(const LaplaceParams& p, int nx, int ny) {
  if (nx < 16 || ny < 16) throw InvalidInput("make_laplace_pair: grid must be at least 16x16");
  LaplaceSample s;
  s.params = p;
  s.u = GridFunction(nx, ny);
  s.f = GridFunction(nx, ny);
  const double hx = 1.0 / (nx - 1), hy = 1.0 / (ny - 1);
  const double hfx = hx / 4.0, hfy = hy / 4.0;
  for (int i = 0; i < nx; ++i) {
    const double x = i * hx;
    for (int j = 0; j < ny; ++j) {
      const double y = j * hy;
      s.u.at(i, j) = laplace_truth(x, y, p);
      auto u = [&](double a, double b) { return laplace_truth(a, b, p); };
      const double uxx = (-u(x - 2 * hfx, y) + 16 * u(x - hfx, y) - 30 * u(x, y) + 16 * u(x + hfx, y) - u(x + 2 * hfx, y)) / (12 * hfx * hfx);
      const double uyy = (-u(x, y - 2 * hfy) + 16 * u(x, y - hfy) - 30 * u(x, y) + 16 * u(x, y + hfy) - u(x, y + 2 * hfy)) / (12 * hfy * hfy);
      s.f.at(i, j) = -(uxx + uyy);
    }
  }
  // boundary nodes are exactly zero by construction
  for (int i = 0; i < nx; ++i) s.u.at(i, 0) = s.u.at(i, ny - 1) = 0.0;
  for (int j = 0; j < ny; ++j) s.u.at(0, j) = s.u.at(nx - 1, j) = 0.0;
  return s;
}

LaplaceSample sample_laplace_pair(Rng& rng, int nx, int ny) {
  LaplaceParams p;
  p.f_max = rng.uniform(1.0, 10.0);
  p.mu0 = rng.uniform(0.2, 0.8);
  p.mu1 = rng.uniform(0.2, 0.8);
  const double theta = rng.uniform(0.0, 2.0 * kPi);
  const double r1 = rng.uniform(5.0, 50.0), r2 = rng.uniform(5.0, 50.0);
  Eigen::Matrix2d q;
  q << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  p.r = q * Eigen::Vector2d(r1, r2).asDiagonal() * q.transpose();
  return make_laplace_pair(p, nx, ny);
}

SolverResult laplace_fdm(const GridFunction& f, Grading grading) {
  SolverResult res;
  res.solver_id = grading == Grading::uniform ? "fdm" : (grading == Grading::left_dense ? "fdm_left" : "fdm_right");
  const int nx = f.nx, ny = f.ny;
  res.field = GridFunction(nx, ny);
  if (!f.values.allFinite()) {
    res.diverged = true;
    return res;
  }
  const int mx = nx - 2, my = ny - 2;
  std::vector<double> xs(nx), us(nx);
  const double hy = 1.0 / (ny - 1);
  for (int i = 0; i < nx; ++i) {
    us[i] = static_cast<double>(i) / (nx - 1);
    xs[i] = graded_x(us[i], grading);
  }
  // source interpolated from the uniform grid onto the (possibly graded) x nodes
  GridFunction fg(nx, ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) fg.at(i, j) = lerp_column(f, us, xs[i], j);

  using Trip = Eigen::Triplet<double>;
  std::vector<Trip> trips;
  trips.reserve(static_cast<std::size_t>(mx) * my * 5);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(mx) * my);
  auto idx = [&](int i, int j) { return static_cast<Eigen::Index>(i - 1) * my + (j - 1); };
  for (int i = 1; i < nx - 1; ++i) {
    const double hm = xs[i] - xs[i - 1], hp = xs[i + 1] - xs[i];
    const double cxm = 2.0 / (hm * (hm + hp)), cxp = 2.0 / (hp * (hm + hp)), cx0 = 2.0 / (hm * hp);
    for (int j = 1; j < ny - 1; ++j) {
      const Eigen::Index k = idx(i, j);
      rhs[k] = fg.at(i, j);
      trips.emplace_back(k, k, cx0 + 2.0 / (hy * hy));
      if (i > 1) trips.emplace_back(k, idx(i - 1, j), -cxm);
      if (i < nx - 2) trips.emplace_back(k, idx(i + 1, j), -cxp);
      if (j > 1) trips.emplace_back(k, idx(i, j - 1), -1.0 / (hy * hy));
      if (j < ny - 2) trips.emplace_back(k, idx(i, j + 1), -1.0 / (hy * hy));
    }
  }
  Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(mx) * my, static_cast<Eigen::Index>(mx) * my);
  a.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) {
    res.diverged = true;
    return res;
  }
  const Eigen::VectorXd sol = lu.solve(rhs);
  if (lu.info() != Eigen::Success) {
    res.diverged = true;
    return res;
  }
  GridFunction ug(nx, ny);
  for (int i = 1; i < nx - 1; ++i)
    for (int j = 1; j < ny - 1; ++j) ug.at(i, j) = sol[idx(i, j)];
  if (grading == Grading::uniform) {
    res.field = ug;
  } else {
    // interpolate the graded-grid solution back to uniform x
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) res.field.at(i, j) = lerp_column(ug, xs, us[i], j);
  }
  res.diverged = clamp_field(res.field);
  return res;
}

SolverResult laplace_spectral(const GridFunction& f) {
  SolverResult res;
  res.solver_id = "spectral";
  const int nx = f.nx, ny = f.ny;
  res.field = GridFunction(nx, ny);
  const int mx = nx - 2, my = ny - 2;
  const double hx = 1.0 / (nx - 1), hy = 1.0 / (ny - 1);
  Matrix sx(mx, mx), sy(my, my);
  for (int i = 0; i < mx; ++i)
    for (int j = 0; j < mx; ++j) sx(i, j) = std::sin(kPi * (i + 1) * (j + 1) * hx);
  for (int i = 0; i < my; ++i)
    for (int j = 0; j < my; ++j) sy(i, j) = std::sin(kPi * (i + 1) * (j + 1) * hy);
  Matrix fi(mx, my);
  for (int i = 0; i < mx; ++i)
    for (int j = 0; j < my; ++j) fi(i, j) = f.at(i + 1, j + 1);
  Matrix coef = (4.0 * hx * hy) * (sx * fi * sy);  // sine coefficients of f
  for (int i = 0; i < mx; ++i)
    for (int j = 0; j < my; ++j) coef(i, j) /= kPi * kPi * ((i + 1.0) * (i + 1.0) + (j + 1.0) * (j + 1.0));
  const Matrix ui = sx * coef * sy;
  for (int i = 0; i < mx; ++i)
    for (int j = 0; j < my; ++j) res.field.at(i + 1, j + 1) = ui(i, j);
  res.diverged = clamp_field(res.field);
  return res;
}

SolverResult laplace_gp(const GridFunction& f, int n_colloc, double lengthscale, Rng& rng) {
  SolverResult res;
  res.solver_id = "gp";
  const int nx = f.nx, ny = f.ny;
  res.field = GridFunction(nx, ny);
  const double hx = 1.0 / (nx - 1), hy = 1.0 / (ny - 1);

  // interior collocation points subsampled without replacement
  const int n_int = (nx - 2) * (ny - 2);
  n_colloc = std::min(n_colloc, n_int);
  std::vector<int> pool(n_int);
  for (int k = 0; k < n_int; ++k) pool[k] = k;
  for (int k = 0; k < n_colloc; ++k) std::swap(pool[k], pool[k + static_cast<int>(rng.below(n_int - k))]);
  const int n_bdry = std::min(2 * (nx + ny) - 4, std::max(32, n_colloc / 4));
  std::vector<int> bpool;
  for (int i = 0; i < nx; ++i) bpool.push_back(i * ny);
  for (int i = 0; i < nx; ++i) bpool.push_back(i * ny + ny - 1);
  for (int j = 1; j < ny - 1; ++j) bpool.push_back(j);
  for (int j = 1; j < ny - 1; ++j) bpool.push_back((nx - 1) * ny + j);
  for (int k = 0; k < n_bdry; ++k) std::swap(bpool[k], bpool[k + static_cast<int>(rng.below(bpool.size() - k))]);

  const int m = n_colloc + n_bdry;
  std::vector<double> px(m), py(m);
  Vector obs(m);
  for (int k = 0; k < n_colloc; ++k) {
    const int ii = pool[k] / (ny - 2) + 1, jj = pool[k] % (ny - 2) + 1;
    px[k] = ii * hx;
    py[k] = jj * hy;
    obs[k] = f.at(ii, jj);
  }
  for (int k = 0; k < n_bdry; ++k) {
    const int ii = bpool[k] / ny, jj = bpool[k] % ny;
    px[n_colloc + k] = ii * hx;
    py[n_colloc + k] = jj * hy;
    obs[n_colloc + k] = 0.0;  // zero Dirichlet data
  }

  const RbfPde kern(lengthscale);
  Matrix k(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = a; b < m; ++b) {
      const double s = sqdist2(px[a], py[a], px[b], py[b]);
      double v;
      if (a < n_colloc && b < n_colloc) v = kern.neg_lap_both(s);
      else if (a >= n_colloc && b >= n_colloc) v = kern.value(s);
      else v = kern.neg_lap(s);
      k(a, b) = k(b, a) = v;
    }
  }
  // diagonal scaling equilibrates the operator and value blocks; the 1e-8
  // nugget is applied on the unit-diagonal system
  Vector d = k.diagonal().cwiseMax(1e-300).cwiseSqrt();
  Matrix ks = d.cwiseInverse().asDiagonal() * k * d.cwiseInverse().asDiagonal();
  ks.diagonal().array() += 1e-8;
  Eigen::LLT<Matrix> llt(ks);
  if (llt.info() != Eigen::Success) {
    res.diverged = true;
    return res;
  }
  const Vector coef = llt.solve(obs.cwiseQuotient(d)).cwiseQuotient(d);

  for (int i = 0; i < nx; ++i) {
    const double x = i * hx;
    for (int j = 0; j < ny; ++j) {
      const double y = j * hy;
      double acc = 0.0;
      for (int a = 0; a < m; ++a) {
        const double s = sqdist2(x, y, px[a], py[a]);
        acc += coef[a] * (a < n_colloc ? kern.neg_lap(s) : kern.value(s));
      }
      res.field.at(i, j) = acc;
    }
  }
  res.diverged = clamp_field(res.field);
  return res;
}

}  // namespace meva
