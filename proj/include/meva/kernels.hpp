#pragma once

#include <Eigen/Dense>

#include "meva/linalg.hpp"

namespace meva {

enum class KernelFamily { matern32, rbf, expsin2 };

struct KernelSpec {
  KernelFamily family = KernelFamily::matern32;
  double lengthscale = 1.0;
};

/// k(u, v). All three families are normalized so k(u, u) = 1.
/// expsin2 is the period-1 kernel exp(-2 sin^2(pi |u-v|) / l^2), scalars only.
double kernel_eval(const KernelSpec& spec, const Vector& u, const Vector& v);

/// Gram matrix with entry (i, j) = k(X.row(i), X2.row(j)).
Matrix gram(const KernelSpec& spec, const Matrix& x, const Matrix& x2);

/// Kernel ridge regression state. Coefficients solve
/// (gram(X, X) + reg * N * I) coef = Y, one column per output. An optional
/// per-output offset (unpenalized intercept) is added to predictions.
struct KrrModel {
  Matrix anchors;
  Matrix coefficients;
  KernelSpec kernel;
  double reg_strength = 0.0;
  Vector offset;  // empty = none

  bool has_offset() const { return offset.size() != 0; }
};

KrrModel krr_fit(const Matrix& x, const Matrix& y, const KernelSpec& spec, double reg,
                 bool center_targets = false);

/// Prediction at a single point: gram(x, anchors) * coefficients.
Vector krr_predict(const KrrModel& m, const Vector& x);

/// Row-wise prediction for many points.
Matrix krr_predict_many(const KrrModel& m, const Matrix& x);

/// Median pairwise distance of the rows of X (the "median heuristic").
/// Uses at most `cap` rows, deterministically strided.
double median_lengthscale(const Matrix& x, int cap = 512);

/// Closed-form minimal empirical error aggregation with the diagonal
/// matrix-valued kernel K(x,y) = k(x,y) I_n, i.e. a scalar KRR in the
/// transformed kernel k~(x,y) = k(x,y) M(x)^T M(y).
struct MeeaModel {
  Matrix anchors;        // N x d training inputs
  Matrix anchor_models;  // N x n model values at the anchors
  Vector coefficients;   // (k~(X,X) + reg N I)^{-1} Y
  KernelSpec base_kernel;
  double reg_strength = 0.0;

  /// Aggregate prediction at x given the model values M(x).
  double predict(const Vector& x, const Vector& model_values) const;
  /// The pointwise weight vector alpha(x) given M(x) (before dotting with M).
  Vector weights(const Vector& x) const;
};

MeeaModel meea_closed_form(const Matrix& x, const Vector& y, const Matrix& model_values,
                           const KernelSpec& base_kernel, double reg);

}  // namespace meva
