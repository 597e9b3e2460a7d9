#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "robinrec/geometry.hpp"

namespace robinrec {

struct SvgCurve {
  std::string label;
  std::string color;
  std::vector<Point> points;
  bool closed = true;
};

/// Equal-aspect overlay of closed curves with a legend.
void write_overlay_svg(std::ostream& out, const std::vector<SvgCurve>& curves);

struct ChartSeries {
  std::string label;
  std::string color;
  std::vector<double> y;  // sampled at x[i]
};

/// Simple line chart; with log_y only positive samples are drawn.
void write_line_chart_svg(std::ostream& out, const std::string& title,
                          const std::vector<double>& x,
                          const std::vector<ChartSeries>& series, bool log_y);

}  // namespace robinrec
