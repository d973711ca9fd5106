#include "cpred/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <limits>

#include "cpred/errors.hpp"
#include "cpred/io/csv.hpp"

namespace cpred::io {

namespace {

constexpr const char* kPalette[] = {"#1b6ca8", "#d1495b", "#66a182",
                                    "#edae49", "#8d5a97", "#3d3d3d",
                                    "#00798c", "#b5651d"};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double margin = 0.04 * (hi - lo);
    lo -= margin;
    hi += margin;
  }
};

// Round tick positions covering [lo, hi] at a 1/2/5 step.
std::vector<double> ticks(double lo, double hi, int target = 6) {
  const double span = hi - lo;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * mult >= raw) {
      step = mag * mult;
      break;
    }
  }
  std::vector<double> out;
  double t = std::ceil(lo / step) * step;
  for (; t <= hi + 1e-12 * span; t += step) {
    out.push_back(t == 0.0 ? 0.0 : t);
  }
  return out;
}

std::string coord(double v) { return fmt::format("{:.2f}", v); }

std::string tick_label(double v) {
  const double r = std::round(v * 1e6) / 1e6;  // strip step roundoff
  return format_double(r == 0.0 ? 0.0 : r);
}

}  // namespace

void write_svg(std::ostream& out, const SvgPlot& plot, int width,
               int height) {
  const double ml = 64, mr = 16, mt = plot.title.empty() ? 16 : 40, mb = 48;
  const double pw = width - ml - mr;
  const double ph = height - mt - mb;

  Range rx, ry;
  for (const auto& s : plot.series) {
    for (double v : s.x) rx.include(v);
    for (double v : s.y) ry.include(v);
  }
  rx.pad();
  ry.pad();

  auto px = [&](double v) { return ml + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto py = [&](double v) { return mt + ph - (v - ry.lo) / (ry.hi - ry.lo) * ph; };

  out << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "viewBox=\"0 0 {} {}\">\n",
      width, height, width, height);
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!plot.title.empty()) {
    out << fmt::format(
        "<text x=\"{}\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\" "
        "text-anchor=\"middle\">{}</text>\n",
        coord(ml + pw / 2), plot.title);
  }

  // Frame and ticks.
  out << fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" "
      "stroke=\"#444\" stroke-width=\"1\"/>\n",
      coord(ml), coord(mt), coord(pw), coord(ph));
  for (double t : ticks(rx.lo, rx.hi)) {
    const double x = px(t);
    out << fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#444\"/>\n",
        coord(x), coord(mt + ph), coord(mt + ph + 5));
    out << fmt::format(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" "
        "text-anchor=\"middle\">{}</text>\n",
        coord(x), coord(mt + ph + 18), tick_label(t));
  }
  for (double t : ticks(ry.lo, ry.hi)) {
    const double y = py(t);
    out << fmt::format(
        "<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"#444\"/>\n",
        coord(y), coord(ml - 5), coord(ml));
    out << fmt::format(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" "
        "text-anchor=\"end\">{}</text>\n",
        coord(ml - 8), coord(y + 4), tick_label(t));
  }
  if (!plot.x_label.empty()) {
    out << fmt::format(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" "
        "text-anchor=\"middle\">{}</text>\n",
        coord(ml + pw / 2), coord(mt + ph + 38), plot.x_label);
  }
  if (!plot.y_label.empty()) {
    out << fmt::format(
        "<text x=\"16\" y=\"{0}\" font-family=\"sans-serif\" font-size=\"13\" "
        "text-anchor=\"middle\" transform=\"rotate(-90 16 {0})\">{1}</text>\n",
        coord(mt + ph / 2), plot.y_label);
  }

  std::size_t color = 0;
  for (const auto& s : plot.series) {
    if (s.x.size() != s.y.size()) {
      throw ValidationError("series x and y must have equal length");
    }
    const char* stroke = kPalette[color % std::size(kPalette)];
    ++color;
    if (s.line && s.x.size() > 1) {
      out << fmt::format("<polyline fill=\"none\" stroke=\"{}\" "
                         "stroke-width=\"1.5\" points=\"",
                         stroke);
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (i > 0) out << ' ';
        out << coord(px(s.x[i])) << ',' << coord(py(s.y[i]));
      }
      out << "\"/>\n";
    }
    if (s.markers || s.x.size() == 1) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        out << fmt::format(
            "<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"{}\"/>\n",
            coord(px(s.x[i])), coord(py(s.y[i])), stroke);
      }
    }
  }

  // Legend in the top-right corner of the frame.
  double ly = mt + 14;
  color = 0;
  for (const auto& s : plot.series) {
    const char* stroke = kPalette[color % std::size(kPalette)];
    ++color;
    if (s.label.empty()) continue;
    out << fmt::format(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" "
        "stroke-width=\"2\"/>\n",
        coord(ml + pw - 110), coord(ly - 4), coord(ml + pw - 90),
        coord(ly - 4), stroke);
    out << fmt::format(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" "
        "font-size=\"11\">{}</text>\n",
        coord(ml + pw - 84), coord(ly), s.label);
    ly += 16;
  }
  out << "</svg>\n";
}

void write_svg(const std::filesystem::path& path, const SvgPlot& plot,
               int width, int height) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  }
  write_svg(out, plot, width, height);
  out.flush();
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace cpred::io
