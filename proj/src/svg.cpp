#include "robinrec/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace robinrec {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.8g", v);
  return buf;
}

}  // namespace

void write_overlay_svg(std::ostream& out, const std::vector<SvgCurve>& curves) {
  if (curves.empty()) throw std::invalid_argument("no curves to draw");
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const SvgCurve& c : curves) {
    if (c.points.empty()) throw std::invalid_argument("empty curve: " + c.label);
    for (const Point& p : c.points) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  }
  const double span = std::max(xmax - xmin, ymax - ymin);
  const double pad = 0.08 * (span > 0 ? span : 1.0);
  const double size = 640.0;
  const double scale = (size - 2.0) / (span + 2.0 * pad);
  auto sx = [&](double x) { return (x - xmin + pad) * scale + 1.0; };
  auto sy = [&](double y) { return size - 1.0 - (y - ymin + pad) * scale; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size
      << "\" height=\"" << size << "\" viewBox=\"0 0 " << size << " " << size
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const SvgCurve& c : curves) {
    out << "<polyline fill=\"none\" stroke=\"" << c.color
        << "\" stroke-width=\"1.5\" points=\"";
    for (const Point& p : c.points) {
      out << fmt(sx(p.x)) << "," << fmt(sy(p.y)) << " ";
    }
    if (c.closed) {
      out << fmt(sx(c.points.front().x)) << "," << fmt(sy(c.points.front().y));
    }
    out << "\"/>\n";
  }
  double ly = 24.0;
  for (const SvgCurve& c : curves) {
    out << "<line x1=\"16\" y1=\"" << fmt(ly - 4) << "\" x2=\"44\" y2=\""
        << fmt(ly - 4) << "\" stroke=\"" << c.color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"50\" y=\"" << fmt(ly)
        << "\" font-family=\"sans-serif\" font-size=\"14\">" << c.label
        << "</text>\n";
    ly += 20.0;
  }
  out << "</svg>\n";
}

void write_line_chart_svg(std::ostream& out, const std::string& title,
                          const std::vector<double>& x,
                          const std::vector<ChartSeries>& series, bool log_y) {
  if (x.empty() || series.empty()) {
    throw std::invalid_argument("empty chart data");
  }
  auto transform = [&](double v) {
    return log_y ? (v > 0 ? std::log10(v) : std::numeric_limits<double>::quiet_NaN())
                 : v;
  };
  double xmin = x.front(), xmax = x.front();
  for (double v : x) {
    xmin = std::min(xmin, v);
    xmax = std::max(xmax, v);
  }
  double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
  for (const ChartSeries& s : series) {
    if (s.y.size() != x.size()) {
      throw std::invalid_argument("series length mismatch: " + s.label);
    }
    for (double v : s.y) {
      const double t = transform(v);
      if (std::isfinite(t)) {
        ymin = std::min(ymin, t);
        ymax = std::max(ymax, t);
      }
    }
  }
  if (!std::isfinite(ymin)) throw std::invalid_argument("no drawable samples");
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;

  const double w = 720.0, hgt = 480.0, ml = 64.0, mr = 16.0, mt = 40.0, mb = 40.0;
  auto sx = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * (w - ml - mr); };
  auto sy = [&](double v) {
    return hgt - mb - (v - ymin) / (ymax - ymin) * (hgt - mt - mb);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << hgt << "\" viewBox=\"0 0 " << w << " " << hgt
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << fmt(w / 2) << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">"
      << title << (log_y ? " (log scale)" : "") << "</text>\n";
  out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(hgt - mb) << "\" x2=\""
      << fmt(w - mr) << "\" y2=\"" << fmt(hgt - mb)
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(mt) << "\" x2=\""
      << fmt(ml) << "\" y2=\"" << fmt(hgt - mb) << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double yv = ymin + (ymax - ymin) * k / 4.0;
    out << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(sy(yv) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(log_y ? std::pow(10.0, yv) : yv) << "</text>\n";
    const double xv = xmin + (xmax - xmin) * k / 4.0;
    out << "<text x=\"" << fmt(sx(xv)) << "\" y=\"" << fmt(hgt - mb + 16)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << fmt(xv) << "</text>\n";
  }
  for (const ChartSeries& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double t = transform(s.y[i]);
      if (std::isfinite(t)) out << fmt(sx(x[i])) << "," << fmt(sy(t)) << " ";
    }
    out << "\"/>\n";
  }
  double ly = mt + 16.0;
  for (const ChartSeries& s : series) {
    out << "<line x1=\"" << fmt(w - mr - 150) << "\" y1=\"" << fmt(ly - 4)
        << "\" x2=\"" << fmt(w - mr - 122) << "\" y2=\"" << fmt(ly - 4)
        << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << fmt(w - mr - 116) << "\" y=\"" << fmt(ly)
        << "\" font-family=\"sans-serif\" font-size=\"13\">" << s.label
        << "</text>\n";
    ly += 18.0;
  }
  out << "</svg>\n";
}

}  // namespace robinrec
