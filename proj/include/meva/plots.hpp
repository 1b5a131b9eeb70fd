#pragma once

#include <string>
#include <vector>

#include "meva/report.hpp"

namespace meva {

enum class PlotKind { pde, tabular, theorem };

PlotKind plot_kind_from_string(const std::string& s);

/// Renders a static SVG from an experiment CSV. `pde` draws per-sample
/// log10 MSE lines sorted by the aggregate's error, `tabular` a bar chart of
/// mean MSE per method, `theorem` a log-log excess-loss plot. Throws
/// SchemaMismatch when the CSV lacks the expected columns.
std::vector<std::string> emit_plots(const std::string& csv_path, PlotKind kind, const std::string& out_dir);

}  // namespace meva
