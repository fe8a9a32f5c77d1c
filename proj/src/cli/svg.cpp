#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace hm::cli {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
constexpr int kPaletteSize = 6;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
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
  double lo = 0.0;
  double hi = 1.0;

  static Range of(const std::vector<double>& v) {
    Range r{0.0, 0.0};
    if (!v.empty()) {
      r.lo = *std::min_element(v.begin(), v.end());
      r.hi = *std::max_element(v.begin(), v.end());
    }
    if (!(r.hi > r.lo)) {
      r.lo -= 1.0;
      r.hi += 1.0;
    }
    return r;
  }
  double map(double v, double a, double b) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

void header(std::ostringstream& os, int w, int h, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" viewBox=\"0 0 " << w << ' ' << h << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
     << "</text>\n";
}

void frame(std::ostringstream& os, double x0, double y0, double x1, double y1) {
  os << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(x1 - x0) << "\" height=\""
     << num(y1 - y0) << "\" fill=\"none\" stroke=\"#444\"/>\n";
}

void text(std::ostringstream& os, double x, double y, const std::string& s, const char* anchor = "middle") {
  os << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" text-anchor=\"" << anchor << "\">" << escape(s)
     << "</text>\n";
}

}  // namespace

std::string line_panels_svg(const std::string& title, const std::vector<double>& x,
                            const std::vector<Series>& series, const std::string& x_label) {
  const int width = 720;
  const int panel_h = 140;
  const int top = 30;
  const double left = 70.0;
  const double right = width - 20.0;
  const int height = top + static_cast<int>(series.size()) * (panel_h + 20) + 40;

  std::ostringstream os;
  header(os, width, height, title);
  const Range xr = Range::of(x);
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double y0 = top + static_cast<double>(s) * (panel_h + 20) + 10;
    const double y1 = y0 + panel_h;
    const Range yr = Range::of(series[s].values);
    frame(os, left, y0, right, y1);
    text(os, left - 6, y0 + 10, tick(yr.hi), "end");
    text(os, left - 6, y1, tick(yr.lo), "end");
    text(os, left + 6, y0 + 14, series[s].label, "start");
    os << "<polyline fill=\"none\" stroke=\"" << kPalette[s % kPaletteSize] << "\" points=\"";
    for (std::size_t i = 0; i < x.size() && i < series[s].values.size(); ++i) {
      os << num(xr.map(x[i], left, right)) << ',' << num(yr.map(series[s].values[i], y1, y0)) << ' ';
    }
    os << "\"/>\n";
  }
  const double bottom = top + static_cast<double>(series.size()) * (panel_h + 20) + 10;
  text(os, left, bottom + 4, tick(xr.lo));
  text(os, right, bottom + 4, tick(xr.hi));
  text(os, (left + right) / 2, bottom + 20, x_label);
  os << "</svg>\n";
  return os.str();
}

std::string density_panels_svg(const std::string& title, const std::vector<Density>& panels,
                               const std::string& x_label, const std::string& y_label, int bins) {
  const int side = 220;
  const int gap = 30;
  const int top = 40;
  const int left = 50;
  const int n = static_cast<int>(panels.size());
  const int width = left + n * (side + gap) + 10;
  const int height = top + side + 50;

  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& p : panels)
    for (const auto& [a, b] : p.points) {
      xs.push_back(a);
      ys.push_back(b);
    }
  const Range xr = Range::of(xs);
  const Range yr = Range::of(ys);

  std::ostringstream os;
  header(os, width, height, title);
  const double cell = static_cast<double>(side) / bins;
  for (int p = 0; p < n; ++p) {
    std::vector<int> counts(static_cast<std::size_t>(bins) * bins, 0);
    for (const auto& [a, b] : panels[p].points) {
      const int i = std::clamp(static_cast<int>((a - xr.lo) / (xr.hi - xr.lo) * bins), 0, bins - 1);
      const int j = std::clamp(static_cast<int>((b - yr.lo) / (yr.hi - yr.lo) * bins), 0, bins - 1);
      ++counts[i * bins + j];
    }
    const int peak = std::max(1, *std::max_element(counts.begin(), counts.end()));
    const double x0 = left + p * (side + gap);
    const double y0 = top;
    for (int i = 0; i < bins; ++i)
      for (int j = 0; j < bins; ++j) {
        const int c = counts[i * bins + j];
        if (c == 0) continue;
        // Log shading keeps sparse tails visible next to the dense core.
        const double t = std::log1p(c) / std::log1p(peak);
        const int shade = static_cast<int>(std::lround(235.0 * (1.0 - t)));
        os << "<rect x=\"" << num(x0 + i * cell) << "\" y=\"" << num(y0 + side - (j + 1) * cell)
           << "\" width=\"" << num(cell) << "\" height=\"" << num(cell) << "\" fill=\"rgb(" << shade << ','
           << shade << ",255)\"/>\n";
      }
    frame(os, x0, y0, x0 + side, y0 + side);
    text(os, x0 + side / 2.0, y0 - 6, panels[p].label);
    text(os, x0, y0 + side + 14, tick(xr.lo));
    text(os, x0 + side, y0 + side + 14, tick(xr.hi));
    text(os, x0 + side / 2.0, y0 + side + 30, x_label);
  }
  text(os, left - 6, top + 10, tick(yr.hi), "end");
  text(os, left - 6, top + side, tick(yr.lo), "end");
  text(os, 12, top + side / 2.0, y_label, "start");
  os << "</svg>\n";
  return os.str();
}

std::string grouped_bars_svg(const std::string& title, const std::vector<std::string>& categories,
                             const std::vector<Series>& series, const std::string& y_label) {
  const int width = 640;
  const int height = 360;
  const double left = 60.0;
  const double right = width - 150.0;
  const double top = 40.0;
  const double bottom = height - 40.0;

  double peak = 0.0;
  for (const auto& s : series)
    for (double v : s.values) peak = std::max(peak, v);
  if (!(peak > 0.0)) peak = 1.0;

  std::ostringstream os;
  header(os, width, height, title);
  frame(os, left, top, right, bottom);
  text(os, left - 6, top + 10, tick(peak), "end");
  text(os, left - 6, bottom, "0", "end");
  text(os, 12, top - 8, y_label, "start");

  const double group_w = (right - left) / std::max<std::size_t>(1, categories.size());
  const double bar_w = group_w * 0.8 / std::max<std::size_t>(1, series.size());
  for (std::size_t c = 0; c < categories.size(); ++c) {
    const double gx = left + c * group_w + group_w * 0.1;
    for (std::size_t s = 0; s < series.size(); ++s) {
      const double v = c < series[s].values.size() ? series[s].values[c] : 0.0;
      const double h = v / peak * (bottom - top);
      os << "<rect x=\"" << num(gx + s * bar_w) << "\" y=\"" << num(bottom - h) << "\" width=\""
         << num(bar_w * 0.9) << "\" height=\"" << num(h) << "\" fill=\"" << kPalette[s % kPaletteSize]
         << "\"/>\n";
    }
    text(os, gx + group_w * 0.4, bottom + 16, categories[c]);
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double y = top + 10 + s * 18.0;
    os << "<rect x=\"" << num(right + 12) << "\" y=\"" << num(y - 9) << "\" width=\"10\" height=\"10\" fill=\""
       << kPalette[s % kPaletteSize] << "\"/>\n";
    text(os, right + 28, y, series[s].label, "start");
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace hm::cli
