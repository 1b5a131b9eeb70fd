#include "meva/plots.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace meva {

namespace {

constexpr int kW = 640, kH = 420, kPad = 56;

struct SvgCanvas {
  std::ostringstream body;

  static double map_x(double v, double lo, double hi) { return kPad + (v - lo) / (hi - lo) * (kW - 2 * kPad); }
  static double map_y(double v, double lo, double hi) { return kH - kPad - (v - lo) / (hi - lo) * (kH - 2 * kPad); }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color) {
    body << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts) body << x << ',' << y << ' ';
    body << "\"/>\n";
  }
  void rect(double x, double y, double w, double h, const std::string& color) {
    body << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << h
         << "\" fill=\"" << color << "\"/>\n";
  }
  void text(double x, double y, const std::string& s, const std::string& extra = "") {
    body << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"11\" font-family=\"sans-serif\" " << extra << '>'
         << s << "</text>\n";
  }
  void axes(const std::string& xlabel, const std::string& ylabel) {
    body << "<line x1=\"" << kPad << "\" y1=\"" << kH - kPad << "\" x2=\"" << kW - kPad << "\" y2=\"" << kH - kPad
         << "\" stroke=\"black\"/>\n";
    body << "<line x1=\"" << kPad << "\" y1=\"" << kPad << "\" x2=\"" << kPad << "\" y2=\"" << kH - kPad
         << "\" stroke=\"black\"/>\n";
    text(kW / 2.0, kH - 12, xlabel);
    text(12, kH / 2.0, ylabel, "transform=\"rotate(-90 12 " + std::to_string(kH / 2) + ")\"");
  }
  void save(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("emit_plots: cannot open " + path);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body.str() << "</svg>\n";
  }
};

const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                         "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

double cell_num(const CsvTable& t, std::size_t row, int col) {
  try {
    return std::stod(t.rows[row][static_cast<std::size_t>(col)]);
  } catch (const std::exception&) {
    throw SchemaMismatch("emit_plots: non-numeric cell in column " + t.columns[static_cast<std::size_t>(col)]);
  }
}

std::string plot_pde(const CsvTable& t, const std::string& out_dir) {
  const int c_sample = t.column_index("sample_id");
  const int c_solver = t.column_index("solver_id");
  const int c_log = t.column_index("log10_mse");
  if (c_sample < 0 || c_solver < 0 || c_log < 0) throw SchemaMismatch("emit_plots: pde CSV needs sample_id, solver_id, log10_mse");
  std::map<std::string, std::map<int, double>> series;
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    series[t.rows[r][static_cast<std::size_t>(c_solver)]][static_cast<int>(cell_num(t, r, c_sample))] = cell_num(t, r, c_log);
  const auto agg = series.find("aggregate");
  if (agg == series.end()) throw SchemaMismatch("emit_plots: pde CSV has no aggregate rows");
  // samples sorted by the aggregate's error
  std::vector<std::pair<double, int>> order;
  for (const auto& [sid, v] : agg->second) order.emplace_back(v, sid);
  std::sort(order.begin(), order.end());

  double lo = 1e300, hi = -1e300;
  for (const auto& [name, vals] : series)
    for (const auto& [sid, v] : vals) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (hi <= lo) hi = lo + 1;
  SvgCanvas svg;
  svg.axes("samples (sorted by aggregate error)", "log10 MSE");
  int color = 0;
  for (const auto& [name, vals] : series) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k < order.size(); ++k) {
      const auto it = vals.find(order[k].second);
      if (it == vals.end()) continue;
      pts.emplace_back(SvgCanvas::map_x(static_cast<double>(k), 0, static_cast<double>(order.size() - 1)),
                       SvgCanvas::map_y(it->second, lo, hi));
    }
    const std::string c = kColors[color % 10];
    svg.polyline(pts, c);
    svg.text(kW - kPad + 4, kPad + 14.0 * color, name, "fill=\"" + c + "\"");
    ++color;
  }
  const std::string path = out_dir + "/pde_sorted_errors.svg";
  svg.save(path);
  return path;
}

std::string plot_tabular(const CsvTable& t, const std::string& out_dir) {
  const int c_method = t.column_index("method");
  const int c_mse = t.column_index("test_mse");
  if (c_method < 0 || c_mse < 0) throw SchemaMismatch("emit_plots: tabular CSV needs method, test_mse");
  const int c_scope = t.column_index("scope");
  std::map<std::string, std::pair<double, int>> acc;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    std::string key = t.rows[r][static_cast<std::size_t>(c_method)];
    if (c_scope >= 0) key += " (" + t.rows[r][static_cast<std::size_t>(c_scope)] + ")";
    auto& slot = acc[key];
    slot.first += cell_num(t, r, c_mse);
    slot.second += 1;
  }
  double hi = 0;
  for (const auto& [k, v] : acc) hi = std::max(hi, v.first / v.second);
  SvgCanvas svg;
  svg.axes("method", "mean test MSE");
  const double bw = (kW - 2.0 * kPad) / acc.size();
  int i = 0;
  for (const auto& [k, v] : acc) {
    const double mean = v.first / v.second;
    const double y = SvgCanvas::map_y(mean, 0, hi * 1.05);
    svg.rect(kPad + i * bw + 2, y, bw - 4, kH - kPad - y, kColors[i % 10]);
    svg.text(kPad + i * bw + 4, kH - kPad + 12 + (i % 2) * 11, k);
    ++i;
  }
  const std::string path = out_dir + "/tabular_mse.svg";
  svg.save(path);
  return path;
}

std::string plot_theorem(const CsvTable& t, const std::string& out_dir) {
  const int c_n = t.column_index("N");
  const int c_v = t.column_index("excess_v_mean");
  const int c_e = t.column_index("excess_e_mean");
  if (c_n < 0 || c_v < 0 || c_e < 0) throw SchemaMismatch("emit_plots: theorem CSV needs N, excess_v_mean, excess_e_mean");
  std::vector<std::pair<double, double>> pv, pe;
  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  std::vector<std::array<double, 3>> rows;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double lx = std::log10(cell_num(t, r, c_n));
    const double lv = std::log10(std::max(cell_num(t, r, c_v), 1e-300));
    const double le = std::log10(std::max(cell_num(t, r, c_e), 1e-300));
    rows.push_back({lx, lv, le});
    xlo = std::min(xlo, lx);
    xhi = std::max(xhi, lx);
    ylo = std::min({ylo, lv, le});
    yhi = std::max({yhi, lv, le});
  }
  if (yhi <= ylo) yhi = ylo + 1;
  SvgCanvas svg;
  svg.axes("log10 N", "log10 mean excess loss");
  for (const auto& row : rows) {
    pv.emplace_back(SvgCanvas::map_x(row[0], xlo, xhi), SvgCanvas::map_y(row[1], ylo, yhi));
    pe.emplace_back(SvgCanvas::map_x(row[0], xlo, xhi), SvgCanvas::map_y(row[2], ylo, yhi));
  }
  svg.polyline(pv, kColors[0]);
  svg.polyline(pe, kColors[1]);
  svg.text(kW - kPad - 90, kPad, "MEVA excess", "fill=\"" + std::string(kColors[0]) + "\"");
  svg.text(kW - kPad - 90, kPad + 14, "MEEA excess", "fill=\"" + std::string(kColors[1]) + "\"");
  const std::string path = out_dir + "/theorem_rates.svg";
  svg.save(path);
  return path;
}

}  // namespace

PlotKind plot_kind_from_string(const std::string& s) {
  if (s == "pde") return PlotKind::pde;
  if (s == "tabular") return PlotKind::tabular;
  if (s == "theorem") return PlotKind::theorem;
  throw InvalidConfig("unknown plot kind: " + s);
}

std::vector<std::string> emit_plots(const std::string& csv_path, PlotKind kind, const std::string& out_dir) {
  const CsvTable t = read_csv(csv_path);
  switch (kind) {
    case PlotKind::pde: return {plot_pde(t, out_dir)};
    case PlotKind::tabular: return {plot_tabular(t, out_dir)};
    case PlotKind::theorem: return {plot_theorem(t, out_dir)};
  }
  throw InvalidConfig("emit_plots: unknown kind");
}

}  // namespace meva
