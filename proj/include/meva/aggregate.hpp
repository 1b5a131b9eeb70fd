#pragma once

#include <Eigen/Dense>

#include "meva/linalg.hpp"

namespace meva {

/// Diagonal-in-a-rotated-basis covariance model: A(x) = P^T diag(exp(log_vars)) P.
/// With the default identity basis this is the independent-errors model.
struct CovarianceModel {
  Vector log_vars;
  Matrix basis;  // orthonormal P; empty means identity

  bool identity_basis() const { return basis.size() == 0; }
  Matrix reconstruct() const;
};

/// Model second moments: C = E[M M^T], gamma = E[Y M].
struct SecondMoments {
  Matrix c;
  Vector gamma;
};

/// Minimum-variance (BLUE) weights A^{-1}1 / (1^T A^{-1} 1).
Vector mva_weights(const Matrix& a);

/// Softmax(-log_vars), max-subtracted; equals mva_weights(diag(exp(log_vars))).
Vector softmax_weights(const Vector& log_vars);

/// General-basis weights alpha^T = 1^T P^T D P / (1^T P^T D P 1) with
/// D = diag(exp(-log_vars)). Reduces to softmax_weights when P = I.
Vector rotated_weights(const CovarianceModel& model);

/// Unconstrained minimal-error weights C^{-1} gamma. Not normalized to sum 1.
Vector mea_weights(const SecondMoments& m);

/// alpha^T M(x).
double aggregate_pointwise(const Vector& weights, const Vector& model_values);

}  // namespace meva
