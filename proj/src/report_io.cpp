#include "report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "chlab/error.hpp"

namespace chlab::detail {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw Error("failed writing " + path.string());
}

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

// short fixed-format coordinate so the SVG stays byte-stable
std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string svg_line_plot(const PlotSpec& spec, const std::vector<Series>& series) {
  const auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
  const auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
  double x0 = std::numeric_limits<double>::infinity();
  double x1 = -x0;
  double y0 = x0;
  double y1 = -x0;
  for (const Series& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double a = tx(s.x[i]);
      const double b = ty(s.y[i]);
      if (!std::isfinite(a) || !std::isfinite(b)) continue;
      x0 = std::min(x0, a);
      x1 = std::max(x1, a);
      y0 = std::min(y0, b);
      y1 = std::max(y1, b);
    }
  }
  if (!(x0 <= x1)) throw InvalidArgument("plot has no finite points");
  if (x1 - x0 < 1e-300) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  if (y1 - y0 < 1e-300) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const auto px = [&](double a) { return kLeft + (a - x0) / (x1 - x0) * pw; };
  const auto py = [&](double b) { return kTop + (y1 - b) / (y1 - y0) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << coord(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(spec.title)
     << "</text>\n";
  os << "<rect x=\"" << coord(kLeft) << "\" y=\"" << coord(kTop) << "\" width=\"" << coord(pw) << "\" height=\""
     << coord(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  const std::string xl = (spec.log_x ? "log10 " : "") + spec.x_label;
  const std::string yl = (spec.log_y ? "log10 " : "") + spec.y_label;
  os << "<text x=\"" << coord(kLeft + pw / 2) << "\" y=\"" << coord(kHeight - 12) << "\" text-anchor=\"middle\" font-size=\"12\">"
     << escape(xl) << "</text>\n";
  os << "<text x=\"16\" y=\"" << coord(kTop + ph / 2) << "\" transform=\"rotate(-90 16 " << coord(kTop + ph / 2)
     << ")\" text-anchor=\"middle\" font-size=\"12\">" << escape(yl) << "</text>\n";
  for (int t = 0; t <= 4; ++t) {
    const double a = x0 + (x1 - x0) * t / 4.0;
    const double b = y0 + (y1 - y0) * t / 4.0;
    os << "<text x=\"" << coord(px(a)) << "\" y=\"" << coord(kTop + ph + 16) << "\" text-anchor=\"middle\" font-size=\"10\">"
       << coord(a) << "</text>\n";
    os << "<text x=\"" << coord(kLeft - 6) << "\" y=\"" << coord(py(b) + 3) << "\" text-anchor=\"end\" font-size=\"10\">"
       << coord(b) << "</text>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    const char* color = kColors[k % (sizeof kColors / sizeof kColors[0])];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double a = tx(s.x[i]);
      const double b = ty(s.y[i]);
      if (!std::isfinite(a) || !std::isfinite(b)) continue;
      os << (first ? "" : " ") << coord(px(a)) << ',' << coord(py(b));
      first = false;
    }
    os << "\"/>\n";
    os << "<text x=\"" << coord(kLeft + 8) << "\" y=\"" << coord(kTop + 14 + 14 * static_cast<double>(k)) << "\" fill=\"" << color
       << "\" font-size=\"11\">" << escape(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace chlab::detail
