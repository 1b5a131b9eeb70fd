#pragma once

#include "meva/grid.hpp"
#include "meva/rng.hpp"

namespace meva {

enum class BurgersScheme { explicit_fd, implicit_fd, lax_wendroff, spectral, fvm, tvd, riemann };

const char* scheme_name(BurgersScheme s);

/// Periodic GP draw from N(0, K_expsin2) with l = 1.5 on x_i = i/nx, via
/// Cholesky of the Gram matrix with a 1e-10 nugget.
GridFunction sample_burgers_ic(Rng& rng, int nx);

/// Integrates du/dt + d(u^2/2)/dx = nu u_xx from the periodic initial data on
/// the shared space-time grid: nx cells, nt time levels, dt = 1/(nt-1).
/// Output is nx-by-nt (row = x, column = t), first column the initial data.
/// Blow-ups clamp to +-1e6, set the diverged flag, and freeze the state.
SolverResult burgers_solve(const GridFunction& u0, BurgersScheme scheme, double nu, int nt);

/// Fine-grid pseudo-spectral reference: trigonometric upsampling of the
/// initial data to nx_fine, integrating-factor RK4 with nt_fine levels, then
/// restriction onto the nx-by-nt output grid. Requires nx_fine a multiple of
/// nx and nt_fine - 1 a multiple of nt - 1.
GridFunction burgers_reference(const GridFunction& u0, double nu, int nx_fine, int nt_fine, int nt);

}  // namespace meva
