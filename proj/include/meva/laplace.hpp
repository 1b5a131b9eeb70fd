#pragma once

#include <Eigen/Dense>

#include "meva/grid.hpp"
#include "meva/rng.hpp"

namespace meva {

struct LaplaceParams {
  double f_max = 1.0;
  double mu0 = 0.5, mu1 = 0.5;
  Eigen::Matrix2d r = Eigen::Matrix2d::Zero();
};

/// A sampled problem instance: source f = -Lap u and the exact solution u.
struct LaplaceSample {
  GridFunction f;
  GridFunction u;
  LaplaceParams params;
};

double laplace_truth(double x, double y, const LaplaceParams& p);

/// Draws f_max ~ U[1,10], mu ~ U[0.2,0.8]^2, R = Q diag(r1,r2) Q^T with a
/// random rotation Q and r_i ~ U[5,50]; evaluates u analytically on the grid
/// and f = -Lap u by 4th-order central differences at step h/4.
LaplaceSample sample_laplace_pair(Rng& rng, int nx, int ny);

/// Same construction for caller-chosen parameters (R = 0 gives the
/// manufactured-solution limit u = -sin(pi x) sin(pi y) sin(f_max)).
LaplaceSample make_laplace_pair(const LaplaceParams& p, int nx, int ny);

enum class Grading { uniform, left_dense, right_dense };

/// 5-point finite differences with zero Dirichlet data; graded variants warp
/// the x axis by x -> x^1.5 toward the dense side and interpolate back to the
/// uniform output grid.
SolverResult laplace_fdm(const GridFunction& f, Grading grading);

/// Sine-basis diagonalization: DST of the samples of f, division by the
/// continuum eigenvalues pi^2 (j^2 + k^2). Exact for f in the resolved basis.
SolverResult laplace_spectral(const GridFunction& f);

/// RBF collocation solver conditioned on -Lap u = f at n_colloc interior
/// points and u = 0 on boundary points subsampled from the grid.
SolverResult laplace_gp(const GridFunction& f, int n_colloc, double lengthscale, Rng& rng);

}  // namespace meva
