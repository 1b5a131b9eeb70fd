#include "meva/theory.hpp"

#include <cmath>

#include "meva/aggregate.hpp"
#include "meva/gp_kernels.hpp"

namespace meva {

void TheoremCase::validate() const {
  if (a.rows() == 0 || a.rows() != a.cols() || b.size() != a.rows()) throw InvalidInput("TheoremCase: shape mismatch");
  if (var_y <= 0.0 || eps <= 0.0) throw InvalidInput("TheoremCase: var_y and eps must be positive");
  if (std::abs(a.norm() - 1.0) > 1e-10) throw InvalidInput("TheoremCase: A must have unit Frobenius norm");
  const Matrix w = a - b * b.transpose() / var_y;
  Eigen::SelfAdjointEigenSolver<Matrix> es(w);
  if (es.eigenvalues().minCoeff() < -1e-12) throw InvalidInput("TheoremCase: joint covariance not PSD");
}

TheoremCase random_theorem_case(Rng& rng, int n, double eps, double b_scale) {
  TheoremCase c;
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  c.a = g * g.transpose() + static_cast<double>(n) * Matrix::Identity(n, n);
  c.a /= c.a.norm();
  c.var_y = 1.0;
  c.eps = eps;
  c.b = Vector::Zero(n);
  if (b_scale > 0.0) {
    for (int i = 0; i < n; ++i) c.b[i] = b_scale * rng.normal();
    // shrink b until the joint covariance is comfortably PSD
    for (int tries = 0; tries < 60; ++tries) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(c.a - c.b * c.b.transpose() / c.var_y);
      if (es.eigenvalues().minCoeff() > 1e-8) break;
      c.b *= 0.5;
    }
  }
  c.validate();
  return c;
}

Matrix case_c_matrix(const TheoremCase& c) {
  const Eigen::Index n = c.size();
  const Vector ones = Vector::Ones(n);
  return c.eps * c.eps * c.a + (c.var_y * ones + c.eps * c.b) * ones.transpose() +
         c.eps * ones * c.b.transpose();
}

Vector case_gamma(const TheoremCase& c) {
  return Vector::Constant(c.size(), c.var_y) + c.eps * c.b;
}

ClosedForms closed_forms(const TheoremCase& c) {
  c.validate();
  const Eigen::Index n = c.size();
  const Vector ones = Vector::Ones(n);
  const Vector ai1 = spd_solve(c.a, ones);
  const Vector aib = spd_solve(c.a, c.b);
  ClosedForms out;
  out.s = ones.dot(ai1);
  out.t = c.b.dot(ai1);
  out.u = c.b.dot(aib);
  out.v = c.var_y * out.s + c.eps * out.t;
  if (std::abs(out.s) < 1e-14) throw DegenerateCase("closed_forms: s = 0");
  if (std::abs(c.eps + out.t) < 1e-14) throw DegenerateCase("closed_forms: eps + t = 0");
  const double denom = out.s * (c.var_y - out.u) + (c.eps + out.t) * (c.eps + out.t);
  if (std::abs(denom) < 1e-14) throw DegenerateCase("closed_forms: vanishing denominator");
  out.mix_lambda = out.s * (c.var_y - out.u) / denom;
  out.alpha_v = ai1 / out.s;
  out.alpha_r = aib / (c.eps + out.t);
  out.alpha_star = out.mix_lambda * out.alpha_v + (1.0 - out.mix_lambda) * out.alpha_r;
  out.loss_v = c.eps * c.eps / out.s;
  out.loss_star = out.mix_lambda * out.loss_v;
  return out;
}

void sample_case(const TheoremCase& c, int n_draws, Rng& rng, Matrix& m_out, Vector& y_out) {
  c.validate();
  const Eigen::Index n = c.size();
  Matrix w = c.a - c.b * c.b.transpose() / c.var_y;
  w.diagonal().array() += 1e-14;
  Eigen::LLT<Matrix> llt(w);
  Matrix l;
  if (llt.info() == Eigen::Success) {
    l = llt.matrixL();
  } else {
    // PSD within tolerance but numerically semidefinite: eigen square root
    Eigen::SelfAdjointEigenSolver<Matrix> es(w);
    l = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }
  m_out.resize(n_draws, n);
  y_out.resize(n_draws);
  const double sd_y = std::sqrt(c.var_y);
  Vector zn(n);
  for (int i = 0; i < n_draws; ++i) {
    const double y = sd_y * rng.normal();
    for (Eigen::Index j = 0; j < n; ++j) zn[j] = rng.normal();
    const Vector z = (c.b / c.var_y) * y + l * zn;
    y_out[i] = y;
    m_out.row(i) = (Vector::Constant(n, y) + c.eps * z).transpose();
  }
}

EmpiricalEstimates empirical_estimators(const Matrix& m, const Vector& y, double eps) {
  const Eigen::Index big_n = m.rows(), n = m.cols();
  if (big_n <= n) throw InvalidInput("empirical_estimators: need N > n");
  if (y.size() != big_n) throw InvalidInput("empirical_estimators: shape mismatch");
  EmpiricalEstimates e;
  const Matrix centered = m.colwise() - y;  // M - Y 1^T
  e.a_hat = centered.transpose() * centered / (eps * eps * static_cast<double>(big_n));
  e.b_hat = centered.transpose() * y / (eps * static_cast<double>(big_n));
  e.var_y_hat = y.squaredNorm() / static_cast<double>(big_n);
  e.alpha_v_hat = mva_weights(e.a_hat);
  const Matrix mtm = m.transpose() * m;
  Eigen::LLT<Matrix> llt(mtm);
  if (llt.info() != Eigen::Success) throw SingularCovariance("empirical_estimators: singular M^T M");
  e.alpha_e_hat = llt.solve(m.transpose() * y);
  return e;
}

double true_loss(const Vector& alpha, const TheoremCase& c) {
  if (alpha.size() != c.size()) throw InvalidInput("true_loss: dimension mismatch");
  const Vector gamma = case_gamma(c);
  return c.var_y - 2.0 * alpha.dot(gamma) + alpha.dot(case_c_matrix(c) * alpha);
}

namespace {

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double lx = std::log(xs[i]), ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

RateResult rate_experiment(const TheoremCase& c, const std::vector<int>& ns, int trials, Rng& rng) {
  if (trials < 1) throw InvalidInput("rate_experiment: trials must be >= 1");
  RateResult out;
  out.forms = closed_forms(c);
  const double loss_v = out.forms.loss_v;
  const double loss_star = out.forms.loss_star;

  std::vector<double> xs, ev, ee;
  for (std::size_t ni = 0; ni < ns.size(); ++ni) {
    const int n_draws = ns[ni];
    if (n_draws <= c.size()) throw InvalidInput("rate_experiment: each N must exceed the bank size");
    RateRow row;
    row.n = n_draws;
    double sum_v = 0, sum_v2 = 0, sum_e = 0, sum_e2 = 0, sum_lv = 0;
    int kept = 0;
    Matrix m;
    Vector y;
    for (int t = 0; t < trials; ++t) {
      Rng stream = rng.child(static_cast<std::uint64_t>(ni) * 1000003ULL + t);
      sample_case(c, n_draws, stream, m, y);
      try {
        const EmpiricalEstimates est = empirical_estimators(m, y, c.eps);
        Eigen::JacobiSVD<Matrix> svd(est.a_hat);
        const double cond = svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
        if (!(cond < 1e12)) {
          ++row.drops;
          continue;
        }
        const double lv = true_loss(est.alpha_v_hat, c);
        const double le = true_loss(est.alpha_e_hat, c);
        const double xv = lv - loss_v;
        const double xe = le - loss_star;
        sum_v += xv;
        sum_v2 += xv * xv;
        sum_e += xe;
        sum_e2 += xe * xe;
        sum_lv += lv;
        ++kept;
      } catch (const Error&) {
        ++row.drops;
      }
    }
    if (kept == 0) throw FitFailed("rate_experiment: all trials dropped at N=" + std::to_string(n_draws));
    row.excess_v_mean = sum_v / kept;
    row.excess_e_mean = sum_e / kept;
    row.excess_v_se = std::sqrt(std::max(0.0, sum_v2 / kept - row.excess_v_mean * row.excess_v_mean) / kept);
    row.excess_e_se = std::sqrt(std::max(0.0, sum_e2 / kept - row.excess_e_mean * row.excess_e_mean) / kept);
    out.rows.push_back(row);
    xs.push_back(n_draws);
    ev.push_back(std::max(row.excess_v_mean, 1e-300));
    ee.push_back(std::max(row.excess_e_mean, 1e-300));
    if (ni + 1 == ns.size()) out.loss_v_hat_at_largest_n = sum_lv / kept;
  }
  out.slope_v = loglog_slope(xs, ev);
  out.slope_e = loglog_slope(xs, ee);
  return out;
}

NestedKrigingResult nested_kriging_mea(const std::vector<CollocationSet>& colloc_sets, double lengthscale,
                                       const std::function<double(double, double)>& f,
                                       const std::function<double(double, double)>& g,
                                       const Box& domain, int nx, int ny) {
  const int n_models = static_cast<int>(colloc_sets.size());
  if (n_models < 2) throw InvalidInput("nested_kriging_mea: need at least two models");
  const RbfPde kern(lengthscale);

  struct ModelState {
    Matrix pts;          // stacked interior then boundary points
    int n_interior = 0;
    Eigen::LLT<Matrix> llt;  // factor of the scaled K(phi,phi)
    Vector scale;            // diagonal sqrt
    Vector coef;             // K^{-1} obs
  };

  auto entry = [&](const ModelState& a, int i, const ModelState& b, int j) {
    const double s = sqdist2(a.pts(i, 0), a.pts(i, 1), b.pts(j, 0), b.pts(j, 1));
    const bool ia = i < a.n_interior, ib = j < b.n_interior;
    if (ia && ib) return kern.neg_lap_both(s);
    if (!ia && !ib) return kern.value(s);
    return kern.neg_lap(s);
  };

  std::vector<ModelState> models(n_models);
  for (int k = 0; k < n_models; ++k) {
    const auto& cs = colloc_sets[k];
    ModelState& ms = models[k];
    ms.n_interior = static_cast<int>(cs.interior.rows());
    ms.pts.resize(cs.interior.rows() + cs.boundary.rows(), 2);
    ms.pts << cs.interior, cs.boundary;
    const int m = static_cast<int>(ms.pts.rows());
    Matrix kk(m, m);
    Vector obs(m);
    for (int i = 0; i < m; ++i) {
      obs[i] = i < ms.n_interior ? f(ms.pts(i, 0), ms.pts(i, 1)) : g(ms.pts(i, 0), ms.pts(i, 1));
      for (int j = i; j < m; ++j) kk(i, j) = kk(j, i) = entry(ms, i, ms, j);
    }
    ms.scale = kk.diagonal().cwiseMax(1e-300).cwiseSqrt();
    Matrix ks = ms.scale.cwiseInverse().asDiagonal() * kk * ms.scale.cwiseInverse().asDiagonal();
    ks.diagonal().array() += 1e-8;
    ms.llt.compute(ks);
    if (ms.llt.info() != Eigen::Success) throw SingularCovariance("nested_kriging_mea: model Gram not SPD");
    ms.coef = ms.llt.solve(obs.cwiseQuotient(ms.scale)).cwiseQuotient(ms.scale);
  }

  NestedKrigingResult out;
  out.aggregate = GridFunction(nx, ny, domain);
  out.models.assign(n_models, GridFunction(nx, ny, domain));
  const int points = nx * ny;

  // per model: KX_k = K(phi_k, grid) and T_k = K(phi_k,phi_k)^{-1} KX_k
  std::vector<Matrix> kx(n_models), tm(n_models);
  for (int k = 0; k < n_models; ++k) {
    const ModelState& ms = models[k];
    Matrix v(ms.pts.rows(), points);
    for (int p = 0; p < points; ++p) {
      const double x = out.aggregate.x_coord(p / ny), y = out.aggregate.y_coord(p % ny);
      for (int a = 0; a < ms.pts.rows(); ++a) {
        const double s = sqdist2(x, y, ms.pts(a, 0), ms.pts(a, 1));
        v(a, p) = a < ms.n_interior ? kern.neg_lap(s) : kern.value(s);
      }
    }
    kx[k] = v;
    tm[k] = ms.scale.cwiseInverse().asDiagonal() * ms.llt.solve(ms.scale.cwiseInverse().asDiagonal() * v);
    out.models[k].values = v.transpose() * ms.coef;
  }

  // pairwise G_kl = K(phi_k, phi_l) T_l so that E[u_k u_l](x) = T_k(:,p) . G_kl(:,p)
  std::vector<std::vector<Matrix>> cross(n_models, std::vector<Matrix>(n_models));
  for (int k = 0; k < n_models; ++k) {
    for (int l = k; l < n_models; ++l) {
      Matrix b(models[k].pts.rows(), models[l].pts.rows());
      for (int a = 0; a < b.rows(); ++a)
        for (int d = 0; d < b.cols(); ++d) b(a, d) = entry(models[k], a, models[l], d);
      cross[k][l] = b * tm[l];
    }
  }

  Matrix c(n_models, n_models);
  Vector gamma(n_models), vals(n_models);
  for (int p = 0; p < points; ++p) {
    for (int k = 0; k < n_models; ++k) {
      vals[k] = out.models[k].values[p];
      gamma[k] = kx[k].col(p).dot(tm[k].col(p));  // E[xi(x) u_k(x)]
      for (int l = k; l < n_models; ++l) c(k, l) = c(l, k) = tm[k].col(p).dot(cross[k][l].col(p));
    }
    double agg;
    try {
      const Vector w = mea_weights({c, gamma});
      agg = w.dot(vals);
      if (!std::isfinite(agg)) throw SingularCovariance("non-finite aggregate");
    } catch (const Error&) {
      ++out.fallback_points;
      agg = vals.mean();
    }
    out.aggregate.values[p] = agg;
  }
  return out;
}

}  // namespace meva
