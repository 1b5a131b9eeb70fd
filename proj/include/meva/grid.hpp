#pragma once

#include <string>

#include <Eigen/Dense>

#include "meva/linalg.hpp"

namespace meva {

/// Axis-aligned box; 1-D fields use the x range only.
struct Box {
  double x0 = 0.0, x1 = 1.0;
  double y0 = 0.0, y1 = 1.0;
};

/// Scalar field sampled on a rectangular grid, row-major (row i = x index,
/// col j = y or t index). 1-D fields have ny = 1.
struct GridFunction {
  int nx = 0;
  int ny = 1;
  Vector values;
  Box domain;

  GridFunction() = default;
  GridFunction(int nx_, int ny_, Box box = {}) : nx(nx_), ny(ny_), values(Vector::Zero(static_cast<Eigen::Index>(nx_) * ny_)), domain(box) {}

  double& at(int i, int j) { return values[static_cast<Eigen::Index>(i) * ny + j]; }
  double at(int i, int j) const { return values[static_cast<Eigen::Index>(i) * ny + j]; }
  Eigen::Index size() const { return values.size(); }

  double x_coord(int i) const { return nx > 1 ? domain.x0 + (domain.x1 - domain.x0) * i / (nx - 1.0) : domain.x0; }
  double y_coord(int j) const { return ny > 1 ? domain.y0 + (domain.y1 - domain.y0) * j / (ny - 1.0) : domain.y0; }
};

struct SolverResult {
  GridFunction field;
  bool diverged = false;
  std::string solver_id;
};

/// Clamps to [-1e6, 1e6] with NaN -> 1e6; returns true if anything was out of
/// range (the diverged condition).
bool clamp_field(GridFunction& g);

/// Text format: header `MEVA-GRID 1 <nx> <ny>`, then nx*ny values row-major,
/// 17 significant digits. Round-trips bit-exactly.
void write_grid(const GridFunction& g, const std::string& path);
GridFunction read_grid(const std::string& path);

std::string format_double17(double v);

}  // namespace meva
