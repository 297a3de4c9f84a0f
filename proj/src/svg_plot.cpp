// svg_plot.cpp
//
// Minimal self-contained SVG line plots of regret summaries.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>

#include "phase_bandit/harness.hpp"

namespace phase_bandit {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 460.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 190.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 60.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
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

struct Point {
  double x, y, lo, hi;
};

class Axis {
 public:
  Axis(double lo, double hi, bool log_scale, double pix_lo, double pix_hi)
      : log_(log_scale), pix_lo_(pix_lo), pix_hi_(pix_hi) {
    lo_ = transform(lo);
    hi_ = transform(hi);
    if (hi_ - lo_ < 1e-12) {
      lo_ -= 0.5;
      hi_ += 0.5;
    }
  }
  double transform(double v) const { return log_ ? std::log10(v) : v; }
  double pixel(double v) const { return pix_lo_ + (transform(v) - lo_) / (hi_ - lo_) * (pix_hi_ - pix_lo_); }
  std::vector<double> ticks() const {
    std::vector<double> out;
    for (int i = 0; i <= 4; ++i) {
      const double t = lo_ + (hi_ - lo_) * i / 4.0;
      out.push_back(log_ ? std::pow(10.0, t) : t);
    }
    return out;
  }

 private:
  bool log_;
  double lo_, hi_;
  double pix_lo_, pix_hi_;
};

}  // namespace

std::string render_svg(const RegretSummary& summary, SweepAxis x_axis, bool log_log, RegretMetric metric) {
  std::map<std::string, std::vector<Point>> series;
  std::map<std::string, int> other_values;
  for (const auto& c : summary.cells) {
    other_values[std::to_string(x_axis == SweepAxis::n ? c.d : c.n)] = 1;
  }
  const bool tag_other = other_values.size() > 1;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& c : summary.cells) {
    const double x = x_axis == SweepAxis::n ? static_cast<double>(c.n) : static_cast<double>(c.d);
    const double y = metric == RegretMetric::cumulative ? c.mean_cum_regret : c.mean_simple_regret;
    const auto& se = metric == RegretMetric::cumulative ? c.se_cum_regret : c.se_simple_regret;
    if (log_log && !(y > 0.0 && x > 0.0)) continue;
    double lo = y - se.value_or(0.0);
    const double hi = y + se.value_or(0.0);
    if (log_log && lo <= 0.0) lo = y;
    std::string key = c.policy;
    if (tag_other) key += x_axis == SweepAxis::n ? " (d=" + std::to_string(c.d) + ")" : " (n=" + std::to_string(c.n) + ")";
    series[key].push_back({x, y, lo, hi});
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, lo);
    ymax = std::max(ymax, hi);
  }
  if (series.empty()) {
    xmin = ymin = 1.0;
    xmax = ymax = 10.0;
  }

  const Axis xa(xmin, xmax, log_log, kLeft, kWidth - kRight);
  const Axis ya(ymin, ymax, log_log, kHeight - kBottom, kTop);
  const std::string x_name = x_axis == SweepAxis::n ? "n" : "d";
  const std::string y_name = metric == RegretMetric::cumulative ? "mean cumulative regret" : "mean simple regret";

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<g class=\"axes\" stroke=\"black\">\n";
  svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kHeight - kBottom) + "\" x2=\"" + num(kWidth - kRight) +
         "\" y2=\"" + num(kHeight - kBottom) + "\"/>\n";
  svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
         num(kHeight - kBottom) + "\"/>\n";
  svg += "</g>\n<g class=\"ticks\">\n";
  for (double t : xa.ticks()) {
    const double px = xa.pixel(t);
    svg += "<line x1=\"" + num(px) + "\" y1=\"" + num(kHeight - kBottom) + "\" x2=\"" + num(px) + "\" y2=\"" +
           num(kHeight - kBottom + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(px) + "\" y=\"" + num(kHeight - kBottom + 18) + "\" text-anchor=\"middle\">" +
           label(t) + "</text>\n";
  }
  for (double t : ya.ticks()) {
    const double py = ya.pixel(t);
    svg += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(py) + "\" x2=\"" + num(kLeft) + "\" y2=\"" + num(py) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(py + 4) + "\" text-anchor=\"end\">" + label(t) +
           "</text>\n";
  }
  svg += "</g>\n";
  svg += "<text x=\"" + num((kLeft + kWidth - kRight) / 2) + "\" y=\"" + num(kHeight - 15) +
         "\" text-anchor=\"middle\">" + x_name + (log_log ? " (log)" : "") + "</text>\n";
  svg += "<text x=\"18\" y=\"" + num((kTop + kHeight - kBottom) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         num((kTop + kHeight - kBottom) / 2) + ")\">" + y_name + (log_log ? " (log)" : "") + "</text>\n";

  int index = 0;
  std::string legend = "<g class=\"legend\">\n";
  for (auto& [name, points] : series) {
    std::sort(points.begin(), points.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
    const char* color = kPalette[index % (sizeof kPalette / sizeof kPalette[0])];
    svg += "<g class=\"series\" data-policy=\"" + escape(name) + "\">\n";
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (i) svg += ' ';
      svg += num(xa.pixel(points[i].x)) + "," + num(ya.pixel(points[i].y));
    }
    svg += "\"/>\n";
    for (const Point& p : points) {
      const double px = xa.pixel(p.x);
      svg += "<line class=\"errorbar\" x1=\"" + num(px) + "\" y1=\"" + num(ya.pixel(p.lo)) + "\" x2=\"" + num(px) +
             "\" y2=\"" + num(ya.pixel(p.hi)) + "\" stroke=\"" + color + "\"/>\n";
      svg += "<circle cx=\"" + num(px) + "\" cy=\"" + num(ya.pixel(p.y)) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
    }
    svg += "</g>\n";
    const double ly = kTop + 10 + 20.0 * index;
    legend += "<line x1=\"" + num(kWidth - kRight + 15) + "\" y1=\"" + num(ly) + "\" x2=\"" +
              num(kWidth - kRight + 40) + "\" y2=\"" + num(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    legend += "<text class=\"legend-entry\" x=\"" + num(kWidth - kRight + 46) + "\" y=\"" + num(ly + 4) + "\">" +
              escape(name) + "</text>\n";
    ++index;
  }
  legend += "</g>\n";
  svg += legend;
  svg += "</svg>\n";
  return svg;
}

void emit_plot(const std::string& csv_path, SweepAxis x_axis, const std::string& out_path, bool log_log,
               RegretMetric metric) {
  const RegretSummary summary = read_csv_file(csv_path);
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + out_path + "' for writing");
  out << render_svg(summary, x_axis, log_log, metric);
  if (!out.flush()) throw IoError("failed writing '" + out_path + "'");
}

}  // namespace phase_bandit
