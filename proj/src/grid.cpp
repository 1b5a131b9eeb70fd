#include "meva/grid.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace meva {

bool clamp_field(GridFunction& g) {
  bool clipped = false;
  for (Eigen::Index i = 0; i < g.values.size(); ++i) {
    double& v = g.values[i];
    if (std::isnan(v)) {
      v = 1e6;
      clipped = true;
    } else if (v > 1e6) {
      v = 1e6;
      clipped = true;
    } else if (v < -1e6) {
      v = -1e6;
      clipped = true;
    }
  }
  return clipped;
}

std::string format_double17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_grid(const GridFunction& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("write_grid: cannot open " + path);
  out << "MEVA-GRID 1 " << g.nx << ' ' << g.ny << '\n';
  for (int i = 0; i < g.nx; ++i) {
    for (int j = 0; j < g.ny; ++j) {
      if (j) out << ' ';
      out << format_double17(g.at(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError("write_grid: write failed for " + path);
}

GridFunction read_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_grid: cannot open " + path);
  std::string magic;
  int version = 0, nx = 0, ny = 0;
  in >> magic >> version >> nx >> ny;
  if (!in || magic != "MEVA-GRID" || version != 1) throw ParseError("read_grid: bad header in " + path);
  if (nx <= 0 || ny <= 0) throw ParseError("read_grid: bad dimensions in " + path);
  GridFunction g(nx, ny);
  for (Eigen::Index k = 0; k < g.values.size(); ++k) {
    if (!(in >> g.values[k])) throw ParseError("read_grid: truncated data in " + path);
  }
  return g;
}

}  // namespace meva
