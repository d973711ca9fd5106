#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace cpred::io {

/// One plotted series. Lines connect consecutive points; with markers
/// enabled a small circle is drawn at every point as well.
struct SvgSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::string label;
  bool line = true;
  bool markers = false;
};

/// A minimal line plot: axes, ticks, labels, a legend, and polyline series.
struct SvgPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<SvgSeries> series;
};

void write_svg(std::ostream& out, const SvgPlot& plot, int width = 720,
               int height = 480);
void write_svg(const std::filesystem::path& path, const SvgPlot& plot,
               int width = 720, int height = 480);

}  // namespace cpred::io
