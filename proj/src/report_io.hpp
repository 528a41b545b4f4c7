#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace chlab::detail {

/// Shortest round-trip text of a double ("%.17g").
std::string fmt(double x);

/// Writes the whole text or throws Error naming the path.
void write_text(const std::filesystem::path& path, const std::string& text);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

/// Deterministic SVG line chart, one polyline per series.
std::string svg_line_plot(const PlotSpec& spec, const std::vector<Series>& series);

}  // namespace chlab::detail
