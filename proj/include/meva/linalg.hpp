#pragma once

#include <Eigen/Dense>

#include "meva/common.hpp"

namespace meva {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Cholesky solve A x = b for SPD A. If the first factorization fails, retries
/// once with a relative nugget 1e-12 * trace(A)/n on the diagonal; a second
/// failure throws SingularCovariance.
inline Matrix spd_solve(const Matrix& a, const Matrix& b) {
  if (a.rows() == 0 || a.rows() != a.cols()) throw InvalidInput("spd_solve: matrix must be square and non-empty");
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() == Eigen::Success) return llt.solve(b);
  const double nugget = 1e-12 * a.trace() / static_cast<double>(a.rows());
  Matrix jittered = a;
  jittered.diagonal().array() += nugget;
  Eigen::LLT<Matrix> retry(jittered);
  if (retry.info() != Eigen::Success) throw SingularCovariance("spd_solve: Cholesky failed after nugget retry");
  return retry.solve(b);
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw InvalidInput("median of empty set");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
  return 0.5 * (hi + v[mid - 1]);
}

}  // namespace meva
