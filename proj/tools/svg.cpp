// Copyright 2026 The infoprocure Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace infoprocure::cli::svg {

namespace {

constexpr double kPanelW = 320, kPanelH = 240;
constexpr double kLeft = 56, kRight = 12, kTop = 28, kBottom = 40;
constexpr double kTitleH = 36;

constexpr std::array<const char*, 8> kPalette = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                                  "#66a61e", "#e6ab02", "#a6761d", "#666666"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) lo = 0, hi = 1;
    if (hi == lo) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

std::string header(double w, double h, const std::string& title) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
      "viewBox=\"0 0 {:.0f} {:.0f}\" font-family=\"sans-serif\" font-size=\"11\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{:.1f}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
      w, h, w, h, w / 2, escape(title));
}

void axes(std::string& out, double ox, double oy, const std::string& title,
          const std::string& xl, const std::string& yl, const Range& xr, const Range& yr,
          bool log_x) {
  const double pw = kPanelW - kLeft - kRight, ph = kPanelH - kTop - kBottom;
  out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n",
                     ox + kLeft + pw / 2, oy + 16, escape(title));
  out += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" "
                     "fill=\"none\" stroke=\"black\"/>\n",
                     ox + kLeft, oy + kTop, pw, ph);
  for (int i = 0; i <= 4; ++i) {
    const double fx = xr.lo + (xr.hi - xr.lo) * i / 4.0;
    const double fy = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    const double px = ox + kLeft + pw * i / 4.0;
    const double py = oy + kTop + ph - ph * i / 4.0;
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.3g}</text>\n", px,
                       oy + kTop + ph + 14, log_x ? std::pow(10.0, fx) : fx);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.3g}</text>\n",
                       ox + kLeft - 4, py + 4, fy);
  }
  out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n",
                     ox + kLeft + pw / 2, oy + kPanelH - 6, escape(xl));
  out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" "
                     "transform=\"rotate(-90 {:.1f} {:.1f})\">{}</text>\n",
                     ox + 14, oy + kTop + ph / 2, ox + 14, oy + kTop + ph / 2, escape(yl));
}

}  // namespace

std::string render_lines(const std::string& title, const std::vector<LinePanel>& panels,
                         int columns) {
  columns = std::max(1, columns);
  const int rows = static_cast<int>((panels.size() + columns - 1) / columns);
  const double w = kPanelW * std::min<int>(columns, std::max<int>(1, panels.size()));
  const double h = kTitleH + kPanelH * rows + 24;
  std::string out = header(w, h, title);

  // Shared legend from the first panel.
  if (!panels.empty()) {
    double lx = 8;
    for (std::size_t s = 0; s < panels[0].series.size(); ++s) {
      const char* color = kPalette[s % kPalette.size()];
      out += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"10\" height=\"10\" fill=\"{}\"/>"
                         "<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n",
                         lx, h - 18, color, lx + 14, h - 9, escape(panels[0].series[s].name));
      lx += 24 + 7.0 * static_cast<double>(panels[0].series[s].name.size());
    }
  }

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto& panel = panels[p];
    const double ox = kPanelW * static_cast<double>(p % columns);
    const double oy = kTitleH + kPanelH * static_cast<double>(p / columns);
    const auto tx = [&](double x) { return panel.log_x ? std::log10(x) : x; };
    Range xr, yr;
    for (const auto& s : panel.series) {
      for (double x : s.x) xr.add(tx(x));
      for (double y : s.y) yr.add(y);
    }
    if (panel.reference_y) yr.add(*panel.reference_y);
    xr.finish();
    yr.finish();
    axes(out, ox, oy, panel.title, panel.x_label, panel.y_label, xr, yr, panel.log_x);

    const double pw = kPanelW - kLeft - kRight, ph = kPanelH - kTop - kBottom;
    const auto px = [&](double x) { return ox + kLeft + pw * (tx(x) - xr.lo) / (xr.hi - xr.lo); };
    const auto py = [&](double y) { return oy + kTop + ph - ph * (y - yr.lo) / (yr.hi - yr.lo); };

    if (panel.reference_x) {
      out += fmt::format("<line x1=\"{0:.1f}\" x2=\"{0:.1f}\" y1=\"{1:.1f}\" y2=\"{2:.1f}\" "
                         "stroke=\"black\" stroke-dasharray=\"6,3,2,3\"/>\n",
                         px(*panel.reference_x), oy + kTop, oy + kTop + ph);
    }
    if (panel.reference_y) {
      out += fmt::format("<line x1=\"{0:.1f}\" x2=\"{1:.1f}\" y1=\"{2:.1f}\" y2=\"{2:.1f}\" "
                         "stroke=\"#999\" stroke-dasharray=\"4,3\"/>\n",
                         ox + kLeft, ox + kLeft + pw, py(*panel.reference_y));
    }
    for (std::size_t s = 0; s < panel.series.size(); ++s) {
      const auto& series = panel.series[s];
      const char* color = kPalette[s % kPalette.size()];
      std::string points;
      for (std::size_t i = 0; i < series.x.size() && i < series.y.size(); ++i) {
        if (!std::isfinite(series.y[i])) continue;
        points += fmt::format("{:.1f},{:.1f} ", px(series.x[i]), py(series.y[i]));
      }
      out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                         color, points);
      if (series.mark_x) {
        for (std::size_t i = 0; i < series.x.size(); ++i) {
          if (series.x[i] != *series.mark_x) continue;
          out += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"3.5\" fill=\"{}\"/>\n",
                             px(series.x[i]), py(series.y[i]), color);
        }
      }
    }
  }
  out += "</svg>\n";
  return out;
}

std::string render_heat(const std::string& title, const std::vector<HeatPanel>& panels) {
  const double w = kPanelW * static_cast<double>(std::max<std::size_t>(1, panels.size()));
  const double h = kTitleH + kPanelH;
  std::string out = header(w, h, title);

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto& panel = panels[p];
    const double ox = kPanelW * static_cast<double>(p);
    const double oy = kTitleH;
    Range xr, yr;
    for (double x : panel.xs) xr.add(x);
    for (double y : panel.ys) yr.add(y);
    xr.finish();
    yr.finish();
    axes(out, ox, oy, panel.title, panel.x_label, panel.y_label, xr, yr, false);

    double scale = 0.0;
    for (double v : panel.values) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) scale = 1.0;
    const double pw = kPanelW - kLeft - kRight, ph = kPanelH - kTop - kBottom;
    const double cw = pw / static_cast<double>(std::max<std::size_t>(1, panel.xs.size()));
    const double ch = ph / static_cast<double>(std::max<std::size_t>(1, panel.ys.size()));
    for (std::size_t iy = 0; iy < panel.ys.size(); ++iy) {
      for (std::size_t ix = 0; ix < panel.xs.size(); ++ix) {
        const double v = panel.values[iy * panel.xs.size() + ix];
        const double t = std::sqrt(std::min(1.0, std::abs(v) / scale));
        int r, g, b;
        if (v > 0) {
          r = static_cast<int>(240 - 200 * t), g = static_cast<int>(250 - 110 * t),
          b = static_cast<int>(240 - 200 * t);
        } else {
          const int shade = static_cast<int>(235 - 150 * t);
          r = g = b = shade;
        }
        out += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" "
                           "fill=\"rgb({},{},{})\"/>\n",
                           ox + kLeft + cw * static_cast<double>(ix),
                           oy + kTop + ph - ch * static_cast<double>(iy + 1), cw, ch, r, g, b);
      }
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace infoprocure::cli::svg
