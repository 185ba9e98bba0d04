#pragma once

// Minimal standalone SVG line charts.  Output depends only on the input
// values, so identical series give identical bytes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wienergauge/errors.hpp"

namespace wienergauge {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

inline std::string render_svg(const std::vector<Series>& series, bool log_x = false, const std::string& title = "") {
  if (series.empty()) throw PreconditionError("no series to plot");
  double x0 = HUGE_VAL, x1 = -HUGE_VAL, y0 = HUGE_VAL, y1 = -HUGE_VAL;
  for (const auto& s : series) {
    if (s.points.empty()) throw PreconditionError("series '" + s.label + "' is empty");
    for (auto [x, y] : s.points) {
      if (log_x && !(x > 0.0)) throw PreconditionError("log-scaled x needs positive values");
      const double xv = log_x ? std::log10(x) : x;
      if (!std::isfinite(xv) || !std::isfinite(y)) continue;
      x0 = std::min(x0, xv);
      x1 = std::max(x1, xv);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (!(x1 >= x0)) x0 = x1 = 0.0;
  if (!(y1 >= y0)) y0 = y1 = 0.0;
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y1 = y0 + 1.0;

  const double w = 640, h = 400, m = 50;
  auto px = [&](double x) { return m + (x - x0) / (x1 - x0) * (w - 2 * m); };
  auto py = [&](double y) { return h - m - (y - y0) / (y1 - y0) * (h - 2 * m); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
  os << "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  os << "<line x1=\"50\" y1=\"350\" x2=\"590\" y2=\"350\" stroke=\"black\"/>\n";
  os << "<line x1=\"50\" y1=\"50\" x2=\"50\" y2=\"350\" stroke=\"black\"/>\n";
  if (!title.empty())
    os << "<text x=\"320\" y=\"30\" text-anchor=\"middle\" font-size=\"14\">" << detail::svg_escape(title)
       << "</text>\n";
  os << "<text x=\"50\" y=\"370\" font-size=\"10\">" << (log_x ? "1e" : "") << detail::svg_num(x0) << "</text>\n";
  os << "<text x=\"590\" y=\"370\" text-anchor=\"end\" font-size=\"10\">" << (log_x ? "1e" : "")
     << detail::svg_num(x1) << "</text>\n";
  os << "<text x=\"45\" y=\"350\" text-anchor=\"end\" font-size=\"10\">" << detail::svg_num(y0) << "</text>\n";
  os << "<text x=\"45\" y=\"55\" text-anchor=\"end\" font-size=\"10\">" << detail::svg_num(y1) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = colors[k % 6];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (auto [x, y] : series[k].points) {
      const double xv = log_x ? std::log10(x) : x;
      if (!std::isfinite(xv) || !std::isfinite(y)) continue;
      os << (first ? "" : " ") << detail::svg_num(px(xv)) << ',' << detail::svg_num(py(y));
      first = false;
    }
    os << "\"/>\n";
    os << "<text x=\"600\" y=\"" << 60 + 14 * k << "\" font-size=\"10\" fill=\"" << color << "\" text-anchor=\"end\">"
       << detail::svg_escape(series[k].label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline void emit_svg(const std::vector<Series>& series, const std::string& path, bool log_x = false,
                     const std::string& title = "") {
  const std::string text = render_svg(series, log_x, title);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  f << text;
  if (!f) throw Error("write to " + path + " failed");
}

}  // namespace wienergauge
