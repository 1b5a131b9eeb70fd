#include "meva/burgers.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "meva/fft.hpp"
#include "meva/kernels.hpp"

namespace meva {

namespace {

constexpr double kPi = 3.14159265358979323846;

inline double flux(double u) { return 0.5 * u * u; }

using Cvec = std::vector<std::complex<double>>;

struct SpectralOp {
  int nx;
  double nu, dt;
  std::vector<double> k;        // signed wavenumbers
  std::vector<double> e, eh;    // diffusion propagators over dt and dt/2

  SpectralOp(int nx_, double nu_, double dt_) : nx(nx_), nu(nu_), dt(dt_), k(nx_), e(nx_), eh(nx_) {
    for (int j = 0; j < nx; ++j) {
      const int freq = j <= nx / 2 ? j : j - nx;
      k[j] = 2.0 * kPi * freq;
      e[j] = std::exp(-nu * k[j] * k[j] * dt);
      eh[j] = std::exp(-nu * k[j] * k[j] * dt * 0.5);
    }
  }

  // N(u_hat) = -i k fft(u^2/2)
  Cvec nonlinear(const Cvec& uh) const {
    Cvec u = uh;
    fft_inplace(u, true);
    for (auto& z : u) {
      const double v = z.real();
      z = {flux(v), 0.0};
    }
    fft_inplace(u, false);
    for (int j = 0; j < nx; ++j) u[j] *= std::complex<double>(0.0, -k[j]);
    return u;
  }

  void step(Cvec& uh) const {
    const Cvec k1 = nonlinear(uh);
    Cvec t(nx);
    for (int j = 0; j < nx; ++j) t[j] = eh[j] * (uh[j] + 0.5 * dt * k1[j]);
    const Cvec k2 = nonlinear(t);
    for (int j = 0; j < nx; ++j) t[j] = eh[j] * uh[j] + 0.5 * dt * k2[j];
    const Cvec k3 = nonlinear(t);
    for (int j = 0; j < nx; ++j) t[j] = e[j] * uh[j] + dt * eh[j] * k3[j];
    const Cvec k4 = nonlinear(t);
    for (int j = 0; j < nx; ++j)
      uh[j] = e[j] * uh[j] + dt / 6.0 * (e[j] * k1[j] + 2.0 * eh[j] * (k2[j] + k3[j]) + k4[j]);
  }
};

inline double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

inline double rusanov(double ul, double ur) {
  return 0.5 * (flux(ul) + flux(ur)) - 0.5 * std::max(std::abs(ul), std::abs(ur)) * (ur - ul);
}

inline double godunov(double ul, double ur) {
  if (ul >= ur) {  // shock
    const double s = 0.5 * (ul + ur);
    return s > 0.0 ? flux(ul) : flux(ur);
  }
  if (ul > 0.0) return flux(ul);  // right-moving rarefaction
  if (ur < 0.0) return flux(ur);
  return 0.0;  // sonic point
}

bool bad_state(const std::vector<double>& u) {
  for (double v : u) {
    if (!std::isfinite(v) || std::abs(v) > 1e6) return true;
  }
  return false;
}

void clamp_state(std::vector<double>& u) {
  for (double& v : u) {
    if (std::isnan(v)) v = 1e6;
    else if (v > 1e6) v = 1e6;
    else if (v < -1e6) v = -1e6;
  }
}

}  // namespace

const char* scheme_name(BurgersScheme s) {
  switch (s) {
    case BurgersScheme::explicit_fd: return "explicit";
    case BurgersScheme::implicit_fd: return "implicit";
    case BurgersScheme::lax_wendroff: return "lax_wendroff";
    case BurgersScheme::spectral: return "spectral";
    case BurgersScheme::fvm: return "fvm";
    case BurgersScheme::tvd: return "tvd";
    case BurgersScheme::riemann: return "riemann";
  }
  return "unknown";
}

GridFunction sample_burgers_ic(Rng& rng, int nx) {
  if (nx < 32) throw InvalidInput("sample_burgers_ic: nx must be >= 32");
  Matrix x(nx, 1);
  for (int i = 0; i < nx; ++i) x(i, 0) = static_cast<double>(i) / nx;
  KernelSpec spec{KernelFamily::expsin2, 1.5};
  Matrix k = gram(spec, x, x);
  k.diagonal().array() += 1e-10;
  Eigen::LLT<Matrix> llt(k);
  if (llt.info() != Eigen::Success) throw SingularCovariance("sample_burgers_ic: Gram Cholesky failed");
  Vector z(nx);
  for (int i = 0; i < nx; ++i) z[i] = rng.normal();
  GridFunction g(nx, 1);
  g.values = llt.matrixL() * z;
  return g;
}

SolverResult burgers_solve(const GridFunction& u0, BurgersScheme scheme, double nu, int nt) {
  if (u0.ny != 1 || u0.nx < 4) throw InvalidInput("burgers_solve: u0 must be a 1-D field");
  if (nt < 2) throw InvalidInput("burgers_solve: nt must be >= 2");
  const int nx = u0.nx;
  const double dx = 1.0 / nx;
  const double dt = 1.0 / (nt - 1);

  SolverResult res;
  res.solver_id = scheme_name(scheme);
  res.field = GridFunction(nx, nt);
  auto record = [&](int t, const std::vector<double>& u) {
    for (int i = 0; i < nx; ++i) res.field.at(i, t) = u[i];
  };

  std::vector<double> u(u0.values.data(), u0.values.data() + nx);
  record(0, u);

  if (scheme == BurgersScheme::spectral) {
    const SpectralOp op(nx, nu, dt);
    Cvec uh(u.begin(), u.end());
    fft_inplace(uh, false);
    for (int t = 1; t < nt; ++t) {
      op.step(uh);
      Cvec tmp = uh;
      fft_inplace(tmp, true);
      for (int i = 0; i < nx; ++i) u[i] = tmp[i].real();
      if (bad_state(u)) {
        clamp_state(u);
        res.diverged = true;
        for (int s = t; s < nt; ++s) record(s, u);
        return res;
      }
      record(t, u);
    }
    return res;
  }

  Eigen::PartialPivLU<Matrix> implicit_lu;
  if (scheme == BurgersScheme::implicit_fd) {
    const double a = nu * dt / (dx * dx);
    Matrix m = Matrix::Zero(nx, nx);
    for (int i = 0; i < nx; ++i) {
      m(i, i) = 1.0 + 2.0 * a;
      m(i, (i + 1) % nx) = -a;
      m(i, (i + nx - 1) % nx) = -a;
    }
    implicit_lu.compute(m);
  }

  std::vector<double> un(nx);
  for (int t = 1; t < nt; ++t) {
    switch (scheme) {
      case BurgersScheme::explicit_fd:
        for (int i = 0; i < nx; ++i) {
          const double up = u[(i + 1) % nx], um = u[(i + nx - 1) % nx];
          un[i] = u[i] - dt * (flux(up) - flux(um)) / (2 * dx) + nu * dt * (up - 2 * u[i] + um) / (dx * dx);
        }
        break;
      case BurgersScheme::implicit_fd: {
        Vector rhs(nx);
        for (int i = 0; i < nx; ++i) {
          const double up = u[(i + 1) % nx], um = u[(i + nx - 1) % nx];
          rhs[i] = u[i] - dt * (flux(up) - flux(um)) / (2 * dx);  // lagged convection
        }
        const Vector sol = implicit_lu.solve(rhs);
        for (int i = 0; i < nx; ++i) un[i] = sol[i];
        break;
      }
      case BurgersScheme::lax_wendroff:
        for (int i = 0; i < nx; ++i) {
          const double up = u[(i + 1) % nx], um = u[(i + nx - 1) % nx];
          const double fp = flux(up), fm = flux(um), f0 = flux(u[i]);
          const double ap = 0.5 * (u[i] + up), am = 0.5 * (um + u[i]);
          const double conv = (fp - fm) / (2 * dx) - dt / (2 * dx * dx) * (ap * (fp - f0) - am * (f0 - fm));
          un[i] = u[i] - dt * conv + nu * dt * (up - 2 * u[i] + um) / (dx * dx);
        }
        break;
      case BurgersScheme::fvm:
        for (int i = 0; i < nx; ++i) {
          const double up = u[(i + 1) % nx], um = u[(i + nx - 1) % nx];
          const double fp = rusanov(u[i], up), fm = rusanov(um, u[i]);
          un[i] = u[i] - dt / dx * (fp - fm) + nu * dt * (up - 2 * u[i] + um) / (dx * dx);
        }
        break;
      case BurgersScheme::tvd:
        for (int i = 0; i < nx; ++i) {
          auto slope = [&](int c) {
            const double uc = u[(c + nx) % nx];
            return minmod(uc - u[(c + nx - 1) % nx], u[(c + 1) % nx] - uc);
          };
          const double sl = slope(i), sr = slope(i + 1), sm = slope(i - 1);
          const double um = u[(i + nx - 1) % nx], up = u[(i + 1) % nx];
          const double fp = rusanov(u[i] + 0.5 * sl, up - 0.5 * sr);
          const double fm = rusanov(um + 0.5 * sm, u[i] - 0.5 * sl);
          un[i] = u[i] - dt / dx * (fp - fm) + nu * dt * (up - 2 * u[i] + um) / (dx * dx);
        }
        break;
      case BurgersScheme::riemann:
        // inviscid Godunov; nu is ignored by construction
        for (int i = 0; i < nx; ++i) {
          const double up = u[(i + 1) % nx], um = u[(i + nx - 1) % nx];
          un[i] = u[i] - dt / dx * (godunov(u[i], up) - godunov(um, u[i]));
        }
        break;
      case BurgersScheme::spectral:
        break;  // handled above
    }
    u.swap(un);
    if (bad_state(u)) {
      clamp_state(u);
      res.diverged = true;
      for (int s = t; s < nt; ++s) record(s, u);
      return res;
    }
    record(t, u);
  }
  return res;
}

GridFunction burgers_reference(const GridFunction& u0, double nu, int nx_fine, int nt_fine, int nt) {
  if (u0.ny != 1) throw InvalidInput("burgers_reference: u0 must be a 1-D field");
  const int nx = u0.nx;
  if (nx_fine % nx != 0) throw InvalidInput("burgers_reference: nx_fine must be a multiple of nx");
  if ((nt_fine - 1) % (nt - 1) != 0) throw InvalidInput("burgers_reference: nt_fine-1 must be a multiple of nt-1");
  const int sx = nx_fine / nx, st = (nt_fine - 1) / (nt - 1);
  const double dt = 1.0 / (nt_fine - 1);

  std::vector<double> coarse(u0.values.data(), u0.values.data() + nx);
  std::vector<double> fine = trig_upsample(coarse, nx_fine);
  GridFunction out(nx, nt);
  for (int i = 0; i < nx; ++i) out.at(i, 0) = fine[static_cast<std::size_t>(i) * sx];

  const SpectralOp op(nx_fine, nu, dt);
  Cvec uh(fine.begin(), fine.end());
  fft_inplace(uh, false);
  int col = 1;
  for (int s = 1; s < nt_fine; ++s) {
    op.step(uh);
    if (s % st == 0) {
      Cvec tmp = uh;
      fft_inplace(tmp, true);
      for (int i = 0; i < nx; ++i) out.at(i, col) = tmp[static_cast<std::size_t>(i) * sx].real();
      ++col;
    }
  }
  return out;
}

}  // namespace meva
