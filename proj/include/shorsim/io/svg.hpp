// Copyright 2026 The shorsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

namespace shorsim::io {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool line = true;
  bool markers = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  int width = 720;
  int height = 480;
};

// Self-contained SVG document: axes with rounded tick labels, one colored
// polyline or marker set per series, and a legend. Output is a pure function
// of the PlotSpec.
std::string render_plot(const PlotSpec& spec);

}  // namespace shorsim::io
