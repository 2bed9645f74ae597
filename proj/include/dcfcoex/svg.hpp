#ifndef DCFCOEX_SVG_HPP_
#define DCFCOEX_SVG_HPP_

// Minimal SVG line charts for sweep results and offset histograms.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "dcfcoex/harness.hpp"

namespace dcfcoex {

struct SvgSeries {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;
  bool dashed = false;
  bool markers = false;
  /// Optional symmetric error bars, one per point.
  std::vector<double> errors;
};

inline void write_svg_chart(std::ostream& out, const std::string& title, const std::string& x_label,
                            const std::string& y_label, const std::vector<SvgSeries>& series) {
  constexpr double w = 640, h = 420, left = 70, right = 20, top = 40, bottom = 50;
  double x0 = std::numeric_limits<double>::max(), x1 = std::numeric_limits<double>::lowest();
  double y1 = 0.0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      const auto [x, y] = s.points[i];
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y + (i < s.errors.size() ? s.errors[i] : 0.0));
    }
  }
  if (x0 > x1) x0 = 0, x1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 <= 0) y1 = 1;
  y1 *= 1.05;
  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * (w - left - right); };
  auto sy = [&](double y) { return h - bottom - y / y1 * (h - top - bottom); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << h - bottom << "\" x2=\"" << w - right << "\" y2=\"" << h - bottom
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << h - bottom
      << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0;
    const double yv = y1 * k / 4.0;
    out << "<text x=\"" << sx(xv) << "\" y=\"" << h - bottom + 16 << "\" text-anchor=\"middle\">" << xv << "</text>\n";
    out << "<text x=\"" << left - 6 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\">" << yv << "</text>\n";
  }
  out << "<text x=\"" << w / 2 << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << h / 2 << ")\">"
      << y_label << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\"" << (s.dashed ? " stroke-dasharray=\"5,4\"" : "")
        << " points=\"";
    for (const auto& [x, y] : s.points) out << sx(x) << ',' << sy(y) << ' ';
    out << "\"/>\n";
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      const auto [x, y] = s.points[i];
      if (s.markers) out << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
      if (i < s.errors.size() && s.errors[i] > 0) {
        out << "<line x1=\"" << sx(x) << "\" y1=\"" << sy(y - s.errors[i]) << "\" x2=\"" << sx(x) << "\" y2=\""
            << sy(y + s.errors[i]) << "\" stroke=\"" << s.color << "\"/>\n";
      }
    }
    out << "<text x=\"" << w - right - 150 << "\" y=\"" << top + 14 * static_cast<double>(si) << "\" fill=\"" << s.color
        << "\">" << s.label << "</text>\n";
  }
  out << "</svg>\n";
}

/// Model lines and simulation points (with 95% CI bars) per class, in Mb/s.
inline void write_sweep_svg(std::ostream& out, const SweepResult& r, const std::string& title) {
  static const char* colors[] = {"#1f77b4", "#d62728"};
  static const char* names[] = {"high rate", "low rate"};
  std::vector<SvgSeries> series;
  for (int c = 0; c < 2; ++c) {
    SvgSeries model{std::string(names[c]) + " model", colors[c], {}, true, false, {}};
    SvgSeries sim{std::string(names[c]) + " sim", colors[c], {}, false, true, {}};
    for (const auto& row : r.rows) {
      if (row.class_id != c) continue;
      const double x = r.variable == SweepVariable::off_period_T ? row.value / 1000.0 : static_cast<double>(row.value);
      model.points.emplace_back(x, row.model_bps / 1e6);
      sim.points.emplace_back(x, row.sim_mean_bps / 1e6);
      sim.errors.push_back(row.sim_ci95_bps.value_or(0.0) / 1e6);
    }
    series.push_back(std::move(model));
    series.push_back(std::move(sim));
  }
  const std::string x_label = r.variable == SweepVariable::off_period_T ? "T = F [ms]" : "N";
  write_svg_chart(out, title, x_label, "throughput [Mb/s]", series);
}

inline void write_offset_svg(std::ostream& out, const std::vector<OffsetBin>& bins, const std::string& title) {
  SvgSeries s{"P(collision | attempt at offset)", "#2ca02c", {}, false, true, {}};
  for (const auto& b : bins)
    if (b.probability) s.points.emplace_back(static_cast<double>(b.offset_us) / 1000.0, *b.probability);
  s.markers = true;
  write_svg_chart(out, title, "offset from end of ON [ms]", "collision probability", {s});
}

}  // namespace dcfcoex

#endif  // DCFCOEX_SVG_HPP_
