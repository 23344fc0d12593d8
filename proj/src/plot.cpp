#include "rnm/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace rnm {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 72.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 56.0;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

// Round the span up to 1, 2 or 5 times a power of ten.
double nice_step(double span, int target_ticks) {
  if (span <= 0.0) return 1.0;
  const double raw = span / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

}  // namespace

std::string render_line_chart_svg(const std::string& title, const std::string& x_label,
                                  const std::string& y_label, std::span<const ChartSeries> series) {
  double x_min = INFINITY, x_max = -INFINITY, y_min = 0.0, y_max = -INFINITY;
  for (const auto& s : series) {
    for (auto [x, y] : s.points) {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  }
  if (!std::isfinite(x_min)) {
    x_min = 0.0;
    x_max = 1.0;
  }
  if (!std::isfinite(y_max) || y_max <= y_min) y_max = y_min + 1.0;
  if (x_max <= x_min) x_max = x_min + 1.0;
  const double y_step = nice_step(y_max - y_min, 5);
  y_max = std::ceil(y_max / y_step) * y_step;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * pw; };
  auto sy = [&](double y) { return kTop + ph - (y - y_min) / (y_max - y_min) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(title) << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double y = y_min; y <= y_max + 1e-9 * y_step; y += y_step) {
    svg << "<line x1=\"" << kLeft << "\" x2=\"" << num(kLeft + pw) << "\" y1=\"" << num(sy(y)) << "\" y2=\""
        << num(sy(y)) << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(sy(y) + 4) << "\" text-anchor=\"end\">" << num(y)
        << "</text>\n";
  }
  const double x_step = nice_step(x_max - x_min, 8);
  for (double x = std::ceil(x_min / x_step) * x_step; x <= x_max + 1e-9 * x_step; x += x_step) {
    svg << "<text x=\"" << num(sx(x)) << "\" y=\"" << num(kTop + ph + 18) << "\" text-anchor=\"middle\">" << num(x)
        << "</text>\n";
  }
  svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 14) << "\" text-anchor=\"middle\">"
      << escape(x_label) << "</text>\n";
  svg << "<text transform=\"translate(16," << num(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(y_label) << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kColors[i % std::size(kColors)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (auto [x, y] : series[i].points) svg << num(sx(x)) << ',' << num(sy(y)) << ' ';
    svg << "\"/>\n";
    for (auto [x, y] : series[i].points) {
      svg << "<circle cx=\"" << num(sx(x)) << "\" cy=\"" << num(sy(y)) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = kTop + 16 + 20.0 * static_cast<double>(i);
    svg << "<line x1=\"" << num(kLeft + pw + 14) << "\" x2=\"" << num(kLeft + pw + 38) << "\" y1=\"" << num(ly)
        << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << num(kLeft + pw + 44) << "\" y=\"" << num(ly + 4) << "\">" << escape(series[i].label)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::filesystem::path> write_metric_charts(std::span<const ResultRow> rows,
                                                       const std::filesystem::path& out_dir) {
  if (rows.empty()) throw SchemaError("results.csv: no data rows to plot");

  struct Metric {
    const char* column;
    const char* label;
    std::optional<double> ResultRow::*field;
  };
  const Metric metrics[] = {
      {"delivery_ratio", "Message delivery ratio", &ResultRow::delivery_ratio},
      {"mean_retransmitters", "Retransmitting nodes per message", &ResultRow::mean_retransmitters},
      {"energy_per_delivered", "Energy lost per message delivered", &ResultRow::energy_per_delivered},
      {"delay_per_delivered_s", "Delay per message delivered (s)", &ResultRow::delay_per_delivered_s},
  };

  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<const ResultRow*>> cells;
  for (const ResultRow& r : rows) cells[{r.lanes, r.nodes_per_lane}].push_back(&r);

  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& [cell, cell_rows] : cells) {
    for (const Metric& m : metrics) {
      std::map<std::string, ChartSeries> by_protocol;
      for (const ResultRow* r : cell_rows) {
        auto& s = by_protocol[r->protocol];
        s.label = r->protocol;
        if (const auto& v = r->*(m.field)) s.points.emplace_back(r->tx_range_m, *v);
      }
      std::vector<ChartSeries> series;
      for (auto& [name, s] : by_protocol) {
        std::sort(s.points.begin(), s.points.end());
        series.push_back(std::move(s));
      }
      const std::string title = std::string(m.label) + " - " + std::to_string(cell.first) + " lane(s), " +
                                std::to_string(cell.second) + " nodes/lane";
      const auto path = out_dir / (std::string(m.column) + "_lanes" + std::to_string(cell.first) + "_nodes" +
                                   std::to_string(cell.second) + ".svg");
      std::ofstream out(path);
      out << render_line_chart_svg(title, "Transmission range per node (m)", m.label, series);
      if (!out) throw std::runtime_error(path.string() + ": write failed");
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace rnm
