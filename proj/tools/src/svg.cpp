// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace connectikit::cli {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) lo = hi = 0.0;
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      const double pad = std::max(0.5, std::abs(hi) * 0.1);
      lo -= pad;
      hi += pad;
    }
  }
};

void header(std::ostringstream& os, double w, double h, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
     << "\" viewBox=\"0 0 " << fmt(w) << ' ' << fmt(h) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << fmt(w / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
     << "</text>\n";
}

void axes(std::ostringstream& os, double x0, double y0, double w, double h, const Range& xr, const Range& yr) {
  os << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
     << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + w * k / 4.0;
    const double fy = y0 + h - h * k / 4.0;
    os << "<line x1=\"" << fmt(fx) << "\" y1=\"" << fmt(y0 + h) << "\" x2=\"" << fmt(fx) << "\" y2=\""
       << fmt(y0 + h + 5) << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << fmt(fx) << "\" y=\"" << fmt(y0 + h + 18) << "\" text-anchor=\"middle\">"
       << tick_label(xr.lo + (xr.hi - xr.lo) * k / 4.0) << "</text>\n";
    os << "<line x1=\"" << fmt(x0 - 5) << "\" y1=\"" << fmt(fy) << "\" x2=\"" << fmt(x0) << "\" y2=\"" << fmt(fy)
       << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << fmt(x0 - 8) << "\" y=\"" << fmt(fy + 4) << "\" text-anchor=\"end\">"
       << tick_label(yr.lo + (yr.hi - yr.lo) * k / 4.0) << "</text>\n";
  }
}

}  // namespace

std::string render_line_chart(const LineChart& chart) {
  Range xr, yr;
  for (const auto& s : chart.series) {
    for (double v : s.x) xr.include(v);
    for (double v : s.y) yr.include(v);
  }
  xr.finish();
  yr.finish();
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + pw * (v - xr.lo) / (xr.hi - xr.lo); };
  auto py = [&](double v) { return kTop + ph - ph * (v - yr.lo) / (yr.hi - yr.lo); };

  std::ostringstream os;
  header(os, kWidth, kHeight, chart.title);
  axes(os, kLeft, kTop, pw, ph, xr, yr);
  os << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kHeight - 10) << "\" text-anchor=\"middle\">"
     << escape(chart.x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << fmt(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << fmt(kTop + ph / 2) << ")\">" << escape(chart.y_label) << "</text>\n";
  for (std::size_t k = 0; k < chart.series.size(); ++k) {
    const Series& s = chart.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
       << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
    const std::size_t n = std::min(s.x.size(), s.y.size());
    bool first = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      os << (first ? "" : " ") << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i]));
      first = false;
    }
    os << "\"/>\n";
    const double ly = kTop + 14.0 + 16.0 * static_cast<double>(k);
    os << "<line x1=\"" << fmt(kLeft + pw - 150) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\"" << fmt(kLeft + pw - 126)
       << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\""
       << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
    os << "<text x=\"" << fmt(kLeft + pw - 120) << "\" y=\"" << fmt(ly) << "\">" << escape(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string render_histograms(const std::string& title, const std::vector<HistogramPanel>& panels, std::size_t bins) {
  bins = std::max<std::size_t>(bins, 1);
  Range vr;
  for (const auto& p : panels)
    for (double v : p.values) vr.include(v);
  vr.finish();
  std::vector<std::vector<std::size_t>> counts(panels.size(), std::vector<std::size_t>(bins, 0));
  std::size_t max_count = 1;
  for (std::size_t k = 0; k < panels.size(); ++k) {
    for (double v : panels[k].values) {
      if (!std::isfinite(v)) continue;
      auto b = static_cast<std::size_t>((v - vr.lo) / (vr.hi - vr.lo) * static_cast<double>(bins));
      b = std::min(b, bins - 1);
      max_count = std::max(max_count, ++counts[k][b]);
    }
  }
  const double panel_w = 300.0;
  const double panel_h = 220.0;
  const double total_w = kLeft + static_cast<double>(std::max<std::size_t>(panels.size(), 1)) * (panel_w + 40.0);
  const double total_h = kTop + panel_h + kBottom + 20.0;
  std::ostringstream os;
  header(os, total_w, total_h, title);
  Range cr;
  cr.lo = 0.0;
  cr.hi = static_cast<double>(max_count);
  for (std::size_t k = 0; k < panels.size(); ++k) {
    const double x0 = kLeft + static_cast<double>(k) * (panel_w + 40.0);
    const double y0 = kTop + 20.0;
    os << "<text x=\"" << fmt(x0 + panel_w / 2) << "\" y=\"" << fmt(y0 - 6) << "\" text-anchor=\"middle\">"
       << escape(panels[k].title) << "</text>\n";
    axes(os, x0, y0, panel_w, panel_h, vr, cr);
    const double bw = panel_w / static_cast<double>(bins);
    for (std::size_t b = 0; b < bins; ++b) {
      const double h = panel_h * static_cast<double>(counts[k][b]) / static_cast<double>(max_count);
      os << "<rect x=\"" << fmt(x0 + bw * static_cast<double>(b) + 1) << "\" y=\"" << fmt(y0 + panel_h - h)
         << "\" width=\"" << fmt(bw - 2) << "\" height=\"" << fmt(h) << "\" fill=\"" << kPalette[0]
         << "\" fill-opacity=\"0.7\"/>\n";
    }
    os << "<text x=\"" << fmt(x0 + panel_w / 2) << "\" y=\"" << fmt(y0 + panel_h + 34) << "\" text-anchor=\"middle\">"
       << "singular value</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace connectikit::cli
