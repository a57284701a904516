#include "adaptrack/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "adaptrack/errors.hpp"

namespace adaptrack {

namespace {

constexpr double kWidth = 900.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 160.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;
constexpr std::size_t kMaxPoints = 4000;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

LineChart::LineChart(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void LineChart::add_series(std::string name, std::vector<double> x, std::vector<double> y) {
  if (x.size() != y.size() || x.empty()) {
    throw Error("LineChart: series '" + name + "' needs matching non-empty x and y");
  }
  series_.push_back(Series{std::move(name), std::move(x), std::move(y)});
}

void LineChart::add_hline(double y, std::string name) {
  hlines_.push_back(HLine{y, std::move(name)});
}

std::string LineChart::render() const {
  if (series_.empty()) {
    throw Error("LineChart: no series to render");
  }
  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_lo = x_lo;
  double y_hi = -x_lo;
  auto y_value = [&](double y) {
    return log_y_ ? (y > 0.0 ? std::log10(y) : std::numeric_limits<double>::quiet_NaN())
                  : y;
  };
  for (const auto& s : series_) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double y = y_value(s.y[i]);
      if (!std::isfinite(s.x[i]) || !std::isfinite(y)) {
        continue;
      }
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  }
  if (!log_y_) {
    for (const auto& h : hlines_) {
      y_lo = std::min(y_lo, h.y);
      y_hi = std::max(y_hi, h.y);
    }
  }
  if (!std::isfinite(x_lo) || !std::isfinite(y_lo)) {
    throw Error("LineChart: no finite data to render");
  }
  if (x_hi == x_lo) {
    x_hi = x_lo + 1.0;
  }
  if (y_hi == y_lo) {
    y_hi = y_lo + 1.0;
  }
  const double y_pad = 0.05 * (y_hi - y_lo);
  y_lo -= y_pad;
  y_hi += y_pad;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto px = [&](double x) { return kMarginLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) { return kMarginTop + (y_hi - y) / (y_hi - y_lo) * plot_h; };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"16\" "
         "font-family=\"sans-serif\">" + escape(title_) + "</text>\n";

  // Axes box and tick labels.
  svg += "<rect x=\"" + num(kMarginLeft) + "\" y=\"" + num(kMarginTop) + "\" width=\"" +
         num(plot_w) + "\" height=\"" + num(plot_h) +
         "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    const double fx = x_lo + (x_hi - x_lo) * i / ticks;
    const double fy = y_lo + (y_hi - y_lo) * i / ticks;
    svg += "<text x=\"" + num(px(fx)) + "\" y=\"" + num(kHeight - kMarginBottom + 18) +
           "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" + num(fx) +
           "</text>\n";
    const std::string y_text = log_y_ ? ("1e" + num(fy)) : num(fy);
    svg += "<text x=\"" + num(kMarginLeft - 8) + "\" y=\"" + num(py(fy) + 4) +
           "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" + y_text +
           "</text>\n";
    svg += "<line x1=\"" + num(kMarginLeft) + "\" y1=\"" + num(py(fy)) + "\" x2=\"" +
           num(kMarginLeft + plot_w) + "\" y2=\"" + num(py(fy)) +
           "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
  }
  svg += "<text x=\"" + num(kMarginLeft + plot_w / 2) + "\" y=\"" + num(kHeight - 12) +
         "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" +
         escape(x_label_) + "</text>\n";
  svg += "<text x=\"16\" y=\"" + num(kMarginTop + plot_h / 2) +
         "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
         "transform=\"rotate(-90 16 " + num(kMarginTop + plot_h / 2) + ")\">" +
         escape(y_label_) + "</text>\n";

  for (const auto& h : hlines_) {
    const double y = y_value(h.y);
    if (!std::isfinite(y) || y < y_lo || y > y_hi) {
      continue;
    }
    svg += "<line x1=\"" + num(kMarginLeft) + "\" y1=\"" + num(py(y)) + "\" x2=\"" +
           num(kMarginLeft + plot_w) + "\" y2=\"" + num(py(y)) +
           "\" stroke=\"#444444\" stroke-width=\"1\" stroke-dasharray=\"6,4\"/>\n";
  }

  std::size_t color = 0;
  double legend_y = kMarginTop + 10.0;
  for (const auto& s : series_) {
    const char* stroke = kPalette[color % (sizeof(kPalette) / sizeof(kPalette[0]))];
    ++color;
    const std::size_t stride = std::max<std::size_t>(1, s.x.size() / kMaxPoints);
    std::string points;
    bool pen_down = false;
    for (std::size_t i = 0; i < s.x.size(); i += stride) {
      const double y = y_value(s.y[i]);
      if (!std::isfinite(s.x[i]) || !std::isfinite(y)) {
        pen_down = false;
        continue;
      }
      points += pen_down ? " L" : " M";
      points += num(px(s.x[i])) + " " + num(py(y));
      pen_down = true;
    }
    if (!points.empty()) {
      svg += "<path d=\"" + points.substr(1) +
             "\" fill=\"none\" stroke-width=\"1.3\" stroke=\"" + stroke + "\"/>\n";
    }
    svg += "<line x1=\"" + num(kWidth - kMarginRight + 10) + "\" y1=\"" + num(legend_y) +
           "\" x2=\"" + num(kWidth - kMarginRight + 34) + "\" y2=\"" + num(legend_y) +
           "\" stroke=\"" + stroke + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + num(kWidth - kMarginRight + 40) + "\" y=\"" + num(legend_y + 4) +
           "\" font-size=\"12\" font-family=\"sans-serif\">" + escape(s.name) + "</text>\n";
    legend_y += 18.0;
  }
  svg += "</svg>\n";
  return svg;
}

void LineChart::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("LineChart: cannot open " + path);
  }
  out << render();
}

}  // namespace adaptrack
