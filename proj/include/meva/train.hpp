#pragma once

#include <Eigen/Dense>

#include "meva/aggregate.hpp"
#include "meva/kernels.hpp"

namespace meva {

/// Validation triples: inputs x^i, per-model errors e^i_k = M_k(x^i) - Y^i,
/// targets Y^i, and the raw model values.
struct ErrorSamples {
  Matrix inputs;        // N x d
  Matrix errors;        // N x n
  Vector targets;       // N
  Matrix model_values;  // N x n

  static ErrorSamples from_values(const Matrix& inputs, const Matrix& model_values, const Vector& targets);
  void validate() const;
  Eigen::Index count() const { return inputs.rows(); }
  Eigen::Index bank_size() const { return errors.cols(); }
};

enum class MevaLoss { sharp, covariance, direct };

/// Fitted aggregator: log-variance regressors lambda_k plus an optional
/// orthonormal basis P. Weights are rotated_weights (softmax when P = I).
struct MevaAggregator {
  KrrModel log_var_model;
  Matrix basis;  // empty = identity
  MevaLoss loss_kind = MevaLoss::sharp;

  Vector weights_at(const Vector& x) const;
  /// (weights, aggregate value) at x given the bank outputs M(x).
  std::pair<Vector, double> predict(const Vector& x, const Vector& model_values) const;
};

/// Sharp log loss: lambda_k regressed on ln(max((Pe^i)_k^2, 1e-24)) by KRR.
/// With center_targets the regression carries an unpenalized per-model
/// intercept, so heavy regularization shrinks toward the mean log error
/// rather than toward zero.
MevaAggregator fit_meva_sharp(const ErrorSamples& s, const KernelSpec& kernel, double reg,
                              const Matrix& basis = Matrix(), bool center_targets = false);

/// Covariance loss, Gauss-Newton on representer coefficients, initialized at
/// the sharp-loss solution. Step halving keeps the objective non-increasing.
/// center_targets carries the sharp initializer's unpenalized intercept
/// through the iteration.
MevaAggregator fit_meva_gn(const ErrorSamples& s, const KernelSpec& kernel, double reg, int iters,
                           const Matrix& basis = Matrix(), bool center_targets = false);

/// Value of the covariance-loss objective for a fitted aggregator on samples.
double covariance_objective(const MevaAggregator& agg, const ErrorSamples& s, double reg);

/// Minimal empirical error aggregation via the kernel closed form.
MeeaModel fit_meea(const ErrorSamples& s, const KernelSpec& kernel, double reg);

/// Direct variance loss: gradient descent with backtracking on
/// sum_i u(x^i)^T A_i u(x^i) + reg ||c||^2 with u = softmax of kernel logits.
MevaAggregator fit_direct_mva(const ErrorSamples& s, const KernelSpec& kernel, double reg,
                              int steps, double lr);

double direct_objective(const MevaAggregator& agg, const ErrorSamples& s, double reg);

/// Empirical-error interpolant with softmax weights (the mixture-of-experts
/// style aggregate), solved by damped Gauss-Newton on representer logits.
struct SoftmaxInterpolant {
  KrrModel logit_model;

  Vector weights_at(const Vector& x) const;
  double predict(const Vector& x, const Vector& model_values) const;
};

SoftmaxInterpolant fit_meea_softmax(const ErrorSamples& s, const KernelSpec& kernel, double reg,
                                    int iters);

double meea_softmax_objective(const SoftmaxInterpolant& m, const ErrorSamples& s, double reg);

}  // namespace meva
