#pragma once

#include <string>
#include <utility>
#include <vector>

namespace hm::cli {

struct Series {
  std::string label;
  std::vector<double> values;
};

/// Stacked line panels sharing the x axis, one per series (impulse responses).
std::string line_panels_svg(const std::string& title, const std::vector<double>& x,
                            const std::vector<Series>& series, const std::string& x_label);

struct Density {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

/// Side-by-side 2-D histograms on shared axes (joint distribution views).
std::string density_panels_svg(const std::string& title, const std::vector<Density>& panels,
                               const std::string& x_label, const std::string& y_label, int bins = 50);

/// Grouped bars: one group per category, one bar per series within it.
std::string grouped_bars_svg(const std::string& title, const std::vector<std::string>& categories,
                             const std::vector<Series>& series, const std::string& y_label);

}  // namespace hm::cli
