#include "meva/train.hpp"

#include <cmath>

namespace meva {

namespace {

constexpr double kSquaredErrorFloor = 1e-24;

Matrix rotate_errors(const Matrix& errors, const Matrix& basis) {
  if (basis.size() == 0) return errors;
  if (basis.rows() != errors.cols() || basis.cols() != errors.cols()) throw InvalidInput("basis shape mismatch");
  return errors * basis.transpose();  // row i becomes (P e^i)^T
}

Matrix log_squared_targets(const Matrix& rotated_errors) {
  return rotated_errors.array().square().max(kSquaredErrorFloor).log();
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix u = logits;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    Eigen::ArrayXd row = u.row(i).array();
    row -= row.maxCoeff();
    row = row.exp();
    u.row(i) = row / row.sum();
  }
  return u;
}

}  // namespace

ErrorSamples ErrorSamples::from_values(const Matrix& inputs, const Matrix& model_values, const Vector& targets) {
  ErrorSamples s;
  s.inputs = inputs;
  s.model_values = model_values;
  s.targets = targets;
  s.errors = model_values.colwise() - targets;
  s.validate();
  return s;
}

void ErrorSamples::validate() const {
  const Eigen::Index n = inputs.rows();
  if (errors.rows() != n || targets.size() != n || model_values.rows() != n)
    throw InvalidInput("ErrorSamples: row counts disagree");
  if (errors.cols() != model_values.cols()) throw InvalidInput("ErrorSamples: bank sizes disagree");
  if (n == 0) throw InvalidInput("ErrorSamples: empty");
  const double dev = (errors - (model_values.colwise() - targets)).cwiseAbs().maxCoeff();
  if (dev > 1e-12) throw InvalidInput("ErrorSamples: errors != model_values - targets");
}

Vector MevaAggregator::weights_at(const Vector& x) const {
  CovarianceModel cm;
  cm.log_vars = krr_predict(log_var_model, x);
  cm.basis = basis;
  return rotated_weights(cm);
}

std::pair<Vector, double> MevaAggregator::predict(const Vector& x, const Vector& model_values) const {
  Vector w = weights_at(x);
  return {w, aggregate_pointwise(w, model_values)};
}

MevaAggregator fit_meva_sharp(const ErrorSamples& s, const KernelSpec& kernel, double reg, const Matrix& basis,
                              bool center_targets) {
  s.validate();
  const Matrix targets = log_squared_targets(rotate_errors(s.errors, basis));
  MevaAggregator agg;
  agg.log_var_model = krr_fit(s.inputs, targets, kernel, reg, center_targets);
  agg.basis = basis;
  agg.loss_kind = MevaLoss::sharp;
  return agg;
}

double covariance_objective(const MevaAggregator& agg, const ErrorSamples& s, double reg) {
  const Matrix sq = rotate_errors(s.errors, agg.basis).array().square();
  const Matrix lam = krr_predict_many(agg.log_var_model, s.inputs);
  double obj = (lam.array().exp() - sq.array()).square().sum();
  // RKHS norm c^T K c per output, with the same per-sample reg scaling as krr_fit
  const Matrix k = gram(agg.log_var_model.kernel, agg.log_var_model.anchors, agg.log_var_model.anchors);
  const Matrix& c = agg.log_var_model.coefficients;
  obj += reg * static_cast<double>(s.count()) * (c.array() * (k * c).array()).sum();
  return obj;
}

MevaAggregator fit_meva_gn(const ErrorSamples& s, const KernelSpec& kernel, double reg, int iters, const Matrix& basis,
                           bool center_targets) {
  s.validate();
  if (iters < 1) throw InvalidInput("fit_meva_gn: iters must be >= 1");
  MevaAggregator agg = fit_meva_sharp(s, kernel, reg, basis, center_targets);
  agg.loss_kind = MevaLoss::covariance;

  const Matrix sq = rotate_errors(s.errors, basis).array().square();
  const Matrix k = gram(kernel, s.inputs, s.inputs);
  const double reg_total = reg * static_cast<double>(s.count());
  const Vector offset = agg.log_var_model.has_offset() ? agg.log_var_model.offset : Vector::Zero(sq.cols());
  Matrix coefs = agg.log_var_model.coefficients;  // N x n

  auto objective = [&](const Matrix& c) {
    Matrix z = k * c;
    z.rowwise() += offset.transpose();
    double obj = (z.array().exp() - sq.array()).square().sum();
    obj += reg_total * (c.array() * (k * c).array()).sum();
    return obj;
  };

  double obj = objective(coefs);
  for (int it = 0; it < iters; ++it) {
    Matrix step(coefs.rows(), coefs.cols());
    for (Eigen::Index col = 0; col < coefs.cols(); ++col) {
      const Vector z = (k * coefs.col(col)).array() + offset[col];
      const Vector w = z.array().exp();
      const Vector r = w - sq.col(col);
      // J = diag(w) K; normal equations (J^T J + reg K + damp I) d = -(J^T r + reg K c)
      Matrix jtj = k * w.asDiagonal() * w.asDiagonal() * k;
      jtj += reg_total * k;
      jtj.diagonal().array() += 1e-10 * (1.0 + jtj.diagonal().maxCoeff());
      const Vector grad_half = k * w.cwiseProduct(r) + reg_total * (k * coefs.col(col));
      step.col(col) = jtj.ldlt().solve(-grad_half);
    }
    double scale = 1.0;
    bool accepted = false;
    double last_trial = 0.0;
    for (int h = 0; h < 30; ++h) {
      const Matrix trial = coefs + scale * step;
      last_trial = objective(trial);
      if (last_trial <= obj) {
        coefs = trial;
        obj = last_trial;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) {
      // roundoff-level stalls mean convergence, genuine ascent is an error
      if (step.cwiseAbs().maxCoeff() < 1e-12 || last_trial <= obj * (1.0 + 1e-10)) break;
      throw NoDescent("fit_meva_gn: 30 step halvings failed");
    }
  }
  agg.log_var_model.coefficients = coefs;
  return agg;
}

MeeaModel fit_meea(const ErrorSamples& s, const KernelSpec& kernel, double reg) {
  s.validate();
  return meea_closed_form(s.inputs, s.targets, s.model_values, kernel, reg);
}

double direct_objective(const MevaAggregator& agg, const ErrorSamples& s, double reg) {
  const Matrix logits = -krr_predict_many(agg.log_var_model, s.inputs);
  const Matrix u = softmax_rows(logits);
  double obj = (u.array().square() * s.errors.array().square()).sum();
  obj += reg * agg.log_var_model.coefficients.squaredNorm();
  return obj;
}

MevaAggregator fit_direct_mva(const ErrorSamples& s, const KernelSpec& kernel, double reg, int steps, double lr) {
  s.validate();
  if (steps < 0 || lr <= 0.0) throw InvalidInput("fit_direct_mva: bad steps/lr");
  const Eigen::Index n_models = s.bank_size();
  const Eigen::Index n = s.count();

  MevaAggregator agg;
  agg.loss_kind = MevaLoss::direct;
  agg.log_var_model.anchors = s.inputs;
  agg.log_var_model.kernel = kernel;
  agg.log_var_model.reg_strength = reg;
  agg.log_var_model.coefficients = Matrix::Zero(n, n_models);
  if (n_models == 1) return agg;  // single model: weights are identically 1

  const Matrix k = gram(kernel, s.inputs, s.inputs);
  const Matrix e2 = s.errors.array().square();
  Matrix c = Matrix::Zero(n, n_models);  // logit coefficients (lambda = -logits)

  auto objective = [&](const Matrix& cc) {
    const Matrix u = softmax_rows(k * cc);
    return (u.array().square() * e2.array()).sum() + reg * cc.squaredNorm();
  };

  double obj = objective(c);
  for (int it = 0; it < steps; ++it) {
    const Matrix u = softmax_rows(k * c);
    const Matrix g = 2.0 * u.array() * e2.array();  // d obj / d u
    Matrix dl(n, n_models);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double inner = g.row(i).dot(u.row(i));
      dl.row(i) = u.row(i).array() * (g.row(i).array() - inner);
    }
    const Matrix grad = k.transpose() * dl + 2.0 * reg * c;
    const double gnorm = grad.norm();
    if (gnorm < 1e-14 * std::max(1.0, std::abs(obj))) break;
    double step = lr;
    bool accepted = false;
    double last_trial = 0.0;
    for (int h = 0; h < 30; ++h) {
      const Matrix trial = c - step * grad;
      last_trial = objective(trial);
      if (last_trial <= obj) {
        c = trial;
        obj = last_trial;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (last_trial <= obj * (1.0 + 1e-10)) break;
      throw NoDescent("fit_direct_mva: 30 step halvings failed");
    }
  }
  agg.log_var_model.coefficients = -c;  // weights = softmax(logits) = softmax(-lambda)
  return agg;
}

Vector SoftmaxInterpolant::weights_at(const Vector& x) const {
  Vector logits = krr_predict(logit_model, x);
  logits.array() -= logits.maxCoeff();
  Vector u = logits.array().exp();
  return u / u.sum();
}

double SoftmaxInterpolant::predict(const Vector& x, const Vector& model_values) const {
  return weights_at(x).dot(model_values);
}

double meea_softmax_objective(const SoftmaxInterpolant& m, const ErrorSamples& s, double reg) {
  const Matrix u = softmax_rows(krr_predict_many(m.logit_model, s.inputs));
  const Vector pred = (u.array() * s.model_values.array()).rowwise().sum();
  double obj = (s.targets - pred).squaredNorm();
  const Matrix k = gram(m.logit_model.kernel, m.logit_model.anchors, m.logit_model.anchors);
  const Matrix& c = m.logit_model.coefficients;
  obj += reg * static_cast<double>(s.count()) * (c.array() * (k * c).array()).sum();
  return obj;
}

SoftmaxInterpolant fit_meea_softmax(const ErrorSamples& s, const KernelSpec& kernel, double reg, int iters) {
  s.validate();
  const Eigen::Index n = s.count();
  const Eigen::Index m_models = s.bank_size();
  const Matrix k = gram(kernel, s.inputs, s.inputs);
  const double reg_total = reg * static_cast<double>(n);

  Matrix c = Matrix::Zero(n, m_models);
  auto objective = [&](const Matrix& cc) {
    const Matrix u = softmax_rows(k * cc);
    const Vector pred = (u.array() * s.model_values.array()).rowwise().sum();
    return (s.targets - pred).squaredNorm() + reg_total * (cc.array() * (k * cc).array()).sum();
  };

  double obj = objective(c);
  const Eigen::Index dim = n * m_models;
  for (int it = 0; it < iters; ++it) {
    const Matrix nu = k * c;
    const Matrix u = softmax_rows(nu);
    const Vector pred = (u.array() * s.model_values.array()).rowwise().sum();
    const Vector r = s.targets - pred;
    // d pred_i / d nu_ik = u_ik (M_ik - pred_i); chain through nu = K c
    Matrix dpred_dnu(n, m_models);
    for (Eigen::Index i = 0; i < n; ++i)
      dpred_dnu.row(i) = u.row(i).array() * (s.model_values.row(i).array() - pred[i]);
    // residual jacobian w.r.t. vec(c): J[i, j + N*kk] = -dpred_dnu(i,kk) * K(i,j)
    Matrix jt(dim, n);
    for (Eigen::Index kk = 0; kk < m_models; ++kk)
      jt.middleRows(kk * n, n) = -(k.array().colwise() * dpred_dnu.col(kk).array()).transpose();
    Matrix jtj = jt * jt.transpose();
    for (Eigen::Index kk = 0; kk < m_models; ++kk)
      jtj.block(kk * n, kk * n, n, n) += reg_total * k;
    jtj.diagonal().array() += 1e-10 * (1.0 + jtj.diagonal().maxCoeff());
    Vector grad_half = jt * r;
    for (Eigen::Index kk = 0; kk < m_models; ++kk)
      grad_half.segment(kk * n, n) += reg_total * (k * c.col(kk));
    const Vector delta = jtj.ldlt().solve(-grad_half);

    double scale = 1.0;
    bool accepted = false;
    double last_trial = 0.0;
    for (int h = 0; h < 30; ++h) {
      Matrix trial = c;
      for (Eigen::Index kk = 0; kk < m_models; ++kk) trial.col(kk) += scale * delta.segment(kk * n, n);
      last_trial = objective(trial);
      if (last_trial <= obj) {
        c = trial;
        obj = last_trial;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) {
      if (delta.cwiseAbs().maxCoeff() < 1e-12 || last_trial <= obj * (1.0 + 1e-10)) break;
      throw NoDescent("fit_meea_softmax: 30 step halvings failed");
    }
  }
  SoftmaxInterpolant out;
  out.logit_model.anchors = s.inputs;
  out.logit_model.kernel = kernel;
  out.logit_model.reg_strength = reg;
  out.logit_model.coefficients = c;
  return out;
}

}  // namespace meva
