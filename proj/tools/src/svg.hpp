// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace connectikit::cli {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

struct HistogramPanel {
  std::string title;
  std::vector<double> values;
};

// Both renderers produce standalone SVG documents. All coordinates are printed with a fixed
// number of decimals so identical inputs give identical bytes.
std::string render_line_chart(const LineChart& chart);
std::string render_histograms(const std::string& title, const std::vector<HistogramPanel>& panels,
                              std::size_t bins = 12);

}  // namespace connectikit::cli
