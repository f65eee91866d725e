#pragma once

#include <string>
#include <vector>

namespace mri::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool step = false;  // draw as a staircase (piecewise-constant data)
};

struct Axes {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool logx = false;
  bool logy = false;
};

/// Line plot, one polyline per series, with a legend. Nonpositive values are
/// dropped on log axes.
std::string line_plot(const Axes& axes, const std::vector<Series>& series);

/// Grouped bar chart: values[g][c] is the bar for group g in category c.
/// NaN bars are left out.
std::string bar_chart(const Axes& axes, const std::vector<std::string>& categories,
                      const std::vector<std::string>& groups, const std::vector<std::vector<double>>& values);

}  // namespace mri::svg
