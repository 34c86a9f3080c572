#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "errors.hpp"
#include "model_syntax.hpp"

namespace levycouple {

namespace {

const char* kColours[] = {"#000000", "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

std::string fmt(double x) { return format_number(std::round(x * 100.0) / 100.0); }

}  // namespace

void write_line_chart(const std::string& path, const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, const std::vector<Series>& series) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : s.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
  }
  if (!(x1 > x0)) x0 -= 1, x1 += 1;
  if (!(y1 > y0)) y0 -= 1, y1 += 1;
  const double w = 640, h = 420, l = 70, r = 160, t = 40, b = 50;
  auto px = [&](double v) { return l + (v - x0) / (x1 - x0) * (w - l - r); };
  auto py = [&](double v) { return h - b - (v - y0) / (y1 - y0) * (h - t - b); };

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\">" << esc(title) << "</text>\n";
  out << "<line x1=\"" << l << "\" y1=\"" << h - b << "\" x2=\"" << w - r << "\" y2=\"" << h - b
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << l << "\" y1=\"" << t << "\" x2=\"" << l << "\" y2=\"" << h - b
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
    out << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << h - b + 16 << "\" text-anchor=\"middle\">"
        << format_number(std::round(xv * 1000) / 1000) << "</text>\n";
    out << "<text x=\"" << l - 6 << "\" y=\"" << fmt(py(yv) + 4) << "\" text-anchor=\"end\">"
        << format_number(std::round(yv * 1000) / 1000) << "</text>\n";
  }
  out << "<text x=\"" << (l + w - r) / 2 << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\">"
      << esc(xlabel) << "</text>\n";
  out << "<text x=\"16\" y=\"" << h / 2 << "\" transform=\"rotate(-90 16 " << h / 2
      << ")\" text-anchor=\"middle\">" << esc(ylabel) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* colour = kColours[s % 6];
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size() && i < series[s].y.size(); ++i)
      out << (i ? " " : "") << fmt(px(series[s].x[i])) << "," << fmt(py(series[s].y[i]));
    out << "\"/>\n";
    out << "<text x=\"" << w - r + 10 << "\" y=\"" << t + 16 * (s + 1) << "\" fill=\"" << colour << "\">"
        << esc(series[s].label) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace levycouple
