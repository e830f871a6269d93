// Copyright 2026 The shorsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "shorsim/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace shorsim::io {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b",
                                    "#17becf", "#7f7f7f", "#bcbd22"};
constexpr int kPaletteSize = int(sizeof kPalette / sizeof kPalette[0]);

struct Range {
  double lo = 0;
  double hi = 1;
};

std::string coord(double value) {
  char buffer[32];
  const int written = std::snprintf(buffer, sizeof buffer, "%.2f", value);
  return std::string(buffer, std::size_t(written));
}

std::string tick_text(double value) {
  char buffer[32];
  // Absorb the signed zero a tick grid can produce.
  if (value == 0) value = 0;
  const int written = std::snprintf(buffer, sizeof buffer, "%.6g", value);
  return std::string(buffer, std::size_t(written));
}

std::string escape(const std::string& text) {
  std::string out;
  for (const char c : text) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

Range data_range(const PlotSpec& spec, bool vertical) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& series : spec.series) {
    for (const auto& [x, y] : series.points) {
      const double v = vertical ? y : x;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(lo <= hi)) return {0, 1};
  if (lo == hi) {
    const double pad = lo == 0 ? 1.0 : std::abs(lo) * 0.5;
    return {lo - pad, hi + pad};
  }
  const double pad = (hi - lo) * 0.05;
  return {lo - pad, hi + pad};
}

double nice_step(double span, int target_ticks) {
  const double raw = span / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (const double mult : {1.0, 2.0, 5.0})
    if (mult * mag >= raw) return mult * mag;
  return 10.0 * mag;
}

}  // namespace

std::string render_plot(const PlotSpec& spec) {
  const double left = 72, right = 20, top = 42, bottom = 56;
  const double w = spec.width, h = spec.height;
  const double plot_w = w - left - right;
  const double plot_h = h - top - bottom;
  const Range xr = data_range(spec, false);
  const Range yr = data_range(spec, true);

  const auto to_px = [&](double x, double y) {
    const double px = left + (x - xr.lo) / (xr.hi - xr.lo) * plot_w;
    const double py = top + (yr.hi - y) / (yr.hi - yr.lo) * plot_h;
    return std::pair<double, double>{px, py};
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 "
      << spec.width << " " << spec.height << "\" font-family=\"sans-serif\""
      << " font-size=\"12\">\n";
  out << "<rect width=\"" << spec.width << "\" height=\"" << spec.height
      << "\" fill=\"white\"/>\n";

  // Grid and tick labels on both axes.
  for (const bool vertical : {false, true}) {
    const Range r = vertical ? yr : xr;
    const double step = nice_step(r.hi - r.lo, 6);
    for (double v = std::ceil(r.lo / step) * step; v <= r.hi;
         v += step) {
      const auto [px, py] = vertical ? to_px(xr.lo, v) : to_px(v, yr.lo);
      if (vertical) {
        out << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(py)
            << "\" x2=\"" << coord(left + plot_w) << "\" y2=\"" << coord(py)
            << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << coord(left - 8) << "\" y=\"" << coord(py + 4)
            << "\" text-anchor=\"end\">" << tick_text(v) << "</text>\n";
      } else {
        out << "<line x1=\"" << coord(px) << "\" y1=\"" << coord(top)
            << "\" x2=\"" << coord(px) << "\" y2=\"" << coord(top + plot_h)
            << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << coord(px) << "\" y=\""
            << coord(top + plot_h + 18) << "\" text-anchor=\"middle\">"
            << tick_text(v) << "</text>\n";
      }
    }
  }

  out << "<rect x=\"" << coord(left) << "\" y=\"" << coord(top)
      << "\" width=\"" << coord(plot_w) << "\" height=\"" << coord(plot_h)
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  int color_index = 0;
  for (const auto& series : spec.series) {
    const char* color = kPalette[color_index % kPaletteSize];
    ++color_index;
    if (series.line && series.points.size() > 1) {
      out << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [x, y] : series.points) {
        const auto [px, py] = to_px(x, y);
        out << coord(px) << "," << coord(py) << " ";
      }
      out << "\"/>\n";
    }
    if (series.markers || series.points.size() == 1) {
      for (const auto& [x, y] : series.points) {
        const auto [px, py] = to_px(x, y);
        out << "<circle cx=\"" << coord(px) << "\" cy=\"" << coord(py)
            << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
    }
  }

  // Legend in the top right corner of the plot area.
  double legend_y = top + 16;
  color_index = 0;
  for (const auto& series : spec.series) {
    const char* color = kPalette[color_index % kPaletteSize];
    ++color_index;
    if (series.label.empty()) continue;
    const double x0 = left + plot_w - 150;
    out << "<line x1=\"" << coord(x0) << "\" y1=\"" << coord(legend_y - 4)
        << "\" x2=\"" << coord(x0 + 24) << "\" y2=\""
        << coord(legend_y - 4) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << coord(x0 + 30) << "\" y=\"" << coord(legend_y)
        << "\">" << escape(series.label) << "</text>\n";
    legend_y += 16;
  }

  if (!spec.title.empty())
    out << "<text x=\"" << coord(w / 2) << "\" y=\"22\""
        << " text-anchor=\"middle\" font-size=\"15\">" << escape(spec.title)
        << "</text>\n";
  if (!spec.x_label.empty())
    out << "<text x=\"" << coord(left + plot_w / 2) << "\" y=\""
        << coord(h - 14) << "\" text-anchor=\"middle\">"
        << escape(spec.x_label) << "</text>\n";
  if (!spec.y_label.empty())
    out << "<text x=\"16\" y=\"" << coord(top + plot_h / 2)
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << coord(top + plot_h / 2) << ")\">" << escape(spec.y_label)
        << "</text>\n";

  out << "</svg>\n";
  return out.str();
}

}  // namespace shorsim::io
