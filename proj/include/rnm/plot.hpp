#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rnm/results_io.hpp"

namespace rnm {

struct ChartSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // x ascending
};

/// Standalone SVG line chart.
std::string render_line_chart_svg(const std::string& title, const std::string& x_label,
                                  const std::string& y_label, std::span<const ChartSeries> series);

/// One chart per metric per (lanes, nodes_per_lane) cell, x = range, one
/// series per protocol. Returns the files written. Throws SchemaError when
/// `rows` is empty.
std::vector<std::filesystem::path> write_metric_charts(std::span<const ResultRow> rows,
                                                       const std::filesystem::path& out_dir);

}  // namespace rnm
