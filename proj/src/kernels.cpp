#include "meva/kernels.hpp"

#include <cmath>
#include <vector>

namespace meva {

namespace {

constexpr double kPi = 3.14159265358979323846;

double flush_tiny(double v) { return std::abs(v) < 1e-300 ? 0.0 : v; }

double eval_dist(const KernelSpec& spec, double dist) {
  switch (spec.family) {
    case KernelFamily::matern32: {
      const double a = std::sqrt(3.0) * dist / spec.lengthscale;
      return flush_tiny((1.0 + a) * std::exp(-a));
    }
    case KernelFamily::rbf: {
      const double a = dist / spec.lengthscale;
      return flush_tiny(std::exp(-0.5 * a * a));
    }
    case KernelFamily::expsin2: {
      const double s = std::sin(kPi * dist);
      return flush_tiny(std::exp(-2.0 * s * s / (spec.lengthscale * spec.lengthscale)));
    }
  }
  throw InvalidInput("kernel_eval: unknown family");
}

}  // namespace

double kernel_eval(const KernelSpec& spec, const Vector& u, const Vector& v) {
  if (spec.lengthscale <= 0.0) throw InvalidInput("kernel_eval: lengthscale must be positive");
  if (u.size() != v.size()) throw InvalidInput("kernel_eval: dimension mismatch");
  if (spec.family == KernelFamily::expsin2 && u.size() != 1) throw InvalidInput("kernel_eval: expsin2 accepts scalars only");
  return eval_dist(spec, (u - v).norm());
}

Matrix gram(const KernelSpec& spec, const Matrix& x, const Matrix& x2) {
  if (spec.lengthscale <= 0.0) throw InvalidInput("gram: lengthscale must be positive");
  if (x.cols() != x2.cols()) throw InvalidInput("gram: dimension mismatch");
  if (spec.family == KernelFamily::expsin2 && x.cols() != 1) throw InvalidInput("gram: expsin2 accepts scalars only");
  // squared distances via the normsq expansion, one GEMM instead of n^2 loops
  Matrix d2 = (-2.0 * x * x2.transpose()).rowwise() + x2.rowwise().squaredNorm().transpose();
  d2.colwise() += x.rowwise().squaredNorm();
  Matrix out(x.rows(), x2.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x2.rows(); ++j)
      out(i, j) = eval_dist(spec, std::sqrt(std::max(0.0, d2(i, j))));
  return out;
}

KrrModel krr_fit(const Matrix& x, const Matrix& y, const KernelSpec& spec, double reg, bool center_targets) {
  if (x.rows() == 0 || x.rows() != y.rows()) throw InvalidInput("krr_fit: need |X| = rows(Y) >= 1");
  if (reg < 0.0) throw InvalidInput("krr_fit: negative regularization");
  Matrix rhs = y;
  KrrModel m;
  if (center_targets) {
    m.offset = y.colwise().mean();
    rhs.rowwise() -= m.offset.transpose();
  }
  Matrix k = gram(spec, x, x);
  k.diagonal().array() += reg * static_cast<double>(x.rows());
  m.anchors = x;
  m.kernel = spec;
  m.reg_strength = reg;
  try {
    m.coefficients = spd_solve(k, rhs);
  } catch (const SingularCovariance&) {
    throw FitFailed("krr_fit: singular system after nugget retry");
  }
  return m;
}

Vector krr_predict(const KrrModel& m, const Vector& x) {
  if (x.size() != m.anchors.cols()) throw InvalidInput("krr_predict: dimension mismatch");
  const Matrix kx = gram(m.kernel, x.transpose(), m.anchors);
  Vector out = (kx * m.coefficients).row(0);
  if (m.has_offset()) out += m.offset;
  return out;
}

Matrix krr_predict_many(const KrrModel& m, const Matrix& x) {
  if (x.cols() != m.anchors.cols()) throw InvalidInput("krr_predict: dimension mismatch");
  Matrix out = gram(m.kernel, x, m.anchors) * m.coefficients;
  if (m.has_offset()) out.rowwise() += m.offset.transpose();
  return out;
}

double median_lengthscale(const Matrix& x, int cap) {
  const Eigen::Index n = x.rows();
  if (n < 2) return 1.0;
  const Eigen::Index stride = std::max<Eigen::Index>(1, n / cap);
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < n; i += stride) idx.push_back(i);
  std::vector<double> dists;
  dists.reserve(idx.size() * (idx.size() - 1) / 2);
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = i + 1; j < idx.size(); ++j)
      dists.push_back((x.row(idx[i]) - x.row(idx[j])).norm());
  const double med = median(std::move(dists));
  return med > 0.0 ? med : 1.0;
}

double MeeaModel::predict(const Vector& x, const Vector& model_values) const {
  return weights(x).dot(model_values);
}

Vector MeeaModel::weights(const Vector& x) const {
  if (x.size() != anchors.cols()) throw InvalidInput("MeeaModel: dimension mismatch");
  const Matrix kx = gram(base_kernel, x.transpose(), anchors);  // 1 x N
  // alpha(x) = sum_j coef_j k(x, x_j) M(x_j)
  Vector alpha = Vector::Zero(anchor_models.cols());
  for (Eigen::Index j = 0; j < anchors.rows(); ++j) alpha += coefficients[j] * kx(0, j) * anchor_models.row(j).transpose();
  return alpha;
}

MeeaModel meea_closed_form(const Matrix& x, const Vector& y, const Matrix& model_values,
                           const KernelSpec& base_kernel, double reg) {
  if (x.rows() != y.size() || x.rows() != model_values.rows()) throw InvalidInput("meea_closed_form: row counts disagree");
  if (x.rows() == 0) throw InvalidInput("meea_closed_form: empty data");
  Matrix kt = gram(base_kernel, x, x);
  kt.array() *= (model_values * model_values.transpose()).array();  // k~ = k .* (M M^T)
  kt.diagonal().array() += reg * static_cast<double>(x.rows());
  MeeaModel m;
  m.anchors = x;
  m.anchor_models = model_values;
  m.base_kernel = base_kernel;
  m.reg_strength = reg;
  Eigen::LLT<Matrix> llt(kt);
  if (llt.info() == Eigen::Success) {
    m.coefficients = llt.solve(y);
    return m;
  }
  // k~ is PSD but often rank-deficient at reg ~ 0; fall back to LDLT, then error
  Eigen::LDLT<Matrix> ldlt(kt);
  if (ldlt.info() != Eigen::Success) throw FitFailed("meea_closed_form: singular k~(X,X) + reg N I");
  m.coefficients = ldlt.solve(y);
  if (!m.coefficients.allFinite()) throw FitFailed("meea_closed_form: singular k~(X,X) + reg N I");
  return m;
}

}  // namespace meva
