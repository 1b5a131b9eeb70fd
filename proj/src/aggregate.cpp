#include "meva/aggregate.hpp"

#include <cmath>

namespace meva {

Matrix CovarianceModel::reconstruct() const {
  const Vector vars = log_vars.array().exp();
  if (identity_basis()) return vars.asDiagonal();
  return basis.transpose() * vars.asDiagonal() * basis;
}

Vector mva_weights(const Matrix& a) {
  if (a.rows() == 0) throw EmptyBank("mva_weights: empty covariance");
  if (a.rows() != a.cols()) throw InvalidInput("mva_weights: covariance must be square");
  const Vector ones = Vector::Ones(a.rows());
  Vector w = spd_solve(a, ones);
  const double denom = w.sum();
  if (denom == 0.0 || !std::isfinite(denom)) throw SingularCovariance("mva_weights: 1^T A^{-1} 1 is degenerate");
  return w / denom;
}

Vector softmax_weights(const Vector& log_vars) {
  if (log_vars.size() == 0) throw EmptyBank("softmax_weights: empty input");
  if (!log_vars.allFinite()) throw InvalidInput("softmax_weights: non-finite entry");
  // weight_i = exp(-lv_i) / sum exp(-lv_k); shift by the min for stability
  const double lo = log_vars.minCoeff();
  Vector w = (-(log_vars.array() - lo)).exp();
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w[i] < 1e-300) w[i] = 0.0;
  }
  return w / w.sum();
}

Vector rotated_weights(const CovarianceModel& model) {
  if (model.log_vars.size() == 0) throw EmptyBank("rotated_weights: empty model");
  if (!model.log_vars.allFinite()) throw InvalidInput("rotated_weights: non-finite log variance");
  if (model.identity_basis()) return softmax_weights(model.log_vars);
  const Eigen::Index n = model.log_vars.size();
  if (model.basis.rows() != n || model.basis.cols() != n) throw InvalidInput("rotated_weights: basis shape mismatch");
  const double lo = model.log_vars.minCoeff();
  const Vector d = (-(model.log_vars.array() - lo)).exp();  // exp(-lv), common factor dropped
  const Vector p1 = model.basis * Vector::Ones(n);          // P 1
  const Vector num = model.basis.transpose() * d.cwiseProduct(p1);  // P^T D P 1
  const double denom = p1.dot(d.cwiseProduct(p1));
  if (std::abs(denom) < 1e-14) throw DegenerateRotation("rotated_weights: 1^T P^T D P 1 too close to zero");
  return num / denom;
}

Vector mea_weights(const SecondMoments& m) {
  if (m.c.rows() == 0) throw EmptyBank("mea_weights: empty moments");
  if (m.c.rows() != m.c.cols() || m.gamma.size() != m.c.rows()) throw InvalidInput("mea_weights: shape mismatch");
  return spd_solve(m.c, m.gamma);
}

double aggregate_pointwise(const Vector& weights, const Vector& model_values) {
  if (weights.size() != model_values.size()) throw InvalidInput("aggregate_pointwise: length mismatch");
  return weights.dot(model_values);
}

}  // namespace meva
