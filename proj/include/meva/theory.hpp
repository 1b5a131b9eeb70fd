#pragma once

#include <functional>
#include <vector>

#include "meva/grid.hpp"
#include "meva/linalg.hpp"
#include "meva/rng.hpp"

namespace meva {

/// Synthetic generating law M = Y 1 + eps Z with Y ~ N(0, var_y),
/// Cov(Z) = A (Frobenius norm 1), E[Y Z] = b.
struct TheoremCase {
  Matrix a;
  Vector b;
  double var_y = 1.0;
  double eps = 0.1;

  /// Checks |A|_F = 1 and PSD-ness of A - b b^T / var_y (joint validity).
  void validate() const;
  Eigen::Index size() const { return b.size(); }
};

/// Random valid case; b_scale controls the error-target correlation (0 gives
/// the t = 0 regime).
TheoremCase random_theorem_case(Rng& rng, int n, double eps, double b_scale);

struct ClosedForms {
  double s = 0, t = 0, u = 0, v = 0;
  double mix_lambda = 0;
  Vector alpha_star, alpha_v, alpha_r;
  double loss_star = 0, loss_v = 0;
};

/// All Appendix-A quantities; alpha_star equals C^{-1} gamma for the moments
/// C = eps^2 A + (var_y 1 + eps b) 1^T + eps 1 b^T, gamma = var_y 1 + eps b.
ClosedForms closed_forms(const TheoremCase& c);

Matrix case_c_matrix(const TheoremCase& c);
Vector case_gamma(const TheoremCase& c);

/// Joint-Gaussian draws: Z = (b / var_y) Y + W, W ~ N(0, A - b b^T / var_y).
void sample_case(const TheoremCase& c, int n_draws, Rng& rng, Matrix& m_out, Vector& y_out);

struct EmpiricalEstimates {
  Matrix a_hat;
  Vector b_hat;
  double var_y_hat = 0;
  Vector alpha_v_hat;
  Vector alpha_e_hat;
};

EmpiricalEstimates empirical_estimators(const Matrix& m, const Vector& y, double eps);

/// Exact population loss E[(Y - alpha^T M)^2] from the case moments.
double true_loss(const Vector& alpha, const TheoremCase& c);

struct RateRow {
  int n = 0;
  double excess_v_mean = 0, excess_v_se = 0;
  double excess_e_mean = 0, excess_e_se = 0;
  int drops = 0;
};

struct RateResult {
  std::vector<RateRow> rows;
  double slope_v = 0;  // log-log least-squares slope of the MEVA excess
  double slope_e = 0;
  double loss_v_hat_at_largest_n = 0;  // mean L(alpha_v_hat) at the largest N
  ClosedForms forms;
};

/// Monte-Carlo excess-loss decay of the empirical MVA and MEA estimators.
/// Trials with cond(A_hat) > 1e12 (or singular normal equations) are dropped
/// and counted.
RateResult rate_experiment(const TheoremCase& c, const std::vector<int>& ns, int trials, Rng& rng);

/// One GP sub-model for the nested-kriging aggregate: interior collocation
/// points (rows of interior) enforcing -Lap u = f, boundary points enforcing
/// u = g.
struct CollocationSet {
  Matrix interior;  // k x 2
  Matrix boundary;  // k_b x 2
};

struct NestedKrigingResult {
  GridFunction aggregate;
  std::vector<GridFunction> models;
  int fallback_points = 0;  // points where the exact MEA solve was singular
};

/// Exact-correlation MEA over GP sub-models sharing one RBF prior. Per grid
/// point the model second moments are assembled in closed form and
/// mea_weights applied; singular points fall back to the uniform average.
NestedKrigingResult nested_kriging_mea(const std::vector<CollocationSet>& colloc_sets, double lengthscale,
                                       const std::function<double(double, double)>& f,
                                       const std::function<double(double, double)>& g,
                                       const Box& domain, int nx, int ny);

}  // namespace meva
