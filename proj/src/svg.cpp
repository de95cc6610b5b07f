#include "hilonet/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "hilonet/errors.hpp"

namespace hilonet {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 150.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 55.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  std::ostringstream oss;
  oss.precision(6);
  oss << v;
  return oss.str();
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void include(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(lo < hi)) {
      lo -= 1.0;
      hi += 1.0;
    } else {
      const double m = 0.05 * (hi - lo);
      lo -= m;
      hi += m;
    }
  }
};

std::vector<double> nice_ticks(const Range& r, int target = 6) {
  const double span = r.hi - r.lo;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (const double m : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  std::vector<double> ticks;
  for (double t = std::ceil(r.lo / step) * step; t <= r.hi + 1e-12 * span; t += step) {
    ticks.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  }
  return ticks;
}

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
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

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series) {
  Range xr, yr;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      xr.include(x);
      yr.include(y);
    }
  }
  if (!std::isfinite(xr.lo) || !std::isfinite(yr.lo)) {
    xr = {0.0, 1.0};
    yr = {0.0, 1.0};
  }
  xr.pad();
  yr.pad();

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  const auto sx = [&](double x) {
    return kMarginLeft + plot_w * (x - xr.lo) / (xr.hi - xr.lo);
  };
  const auto sy = [&](double y) {
    return kMarginTop + plot_h * (1.0 - (y - yr.lo) / (yr.hi - yr.lo));
  };

  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << escape(title) << "</text>\n";

  // axes
  out << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (const double t : nice_ticks(xr)) {
    const double x = sx(t);
    out << "<line x1=\"" << x << "\" y1=\"" << kMarginTop + plot_h << "\" x2=\"" << x
        << "\" y2=\"" << kMarginTop + plot_h + 5 << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << x << "\" y=\"" << kMarginTop + plot_h + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(t)
        << "</text>\n";
  }
  for (const double t : nice_ticks(yr)) {
    const double y = sy(t);
    out << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << y << "\" stroke=\"#333\"/>\n";
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << y << "\" x2=\"" << kMarginLeft + plot_w
        << "\" y2=\"" << y << "\" stroke=\"#eee\"/>\n";
    out << "<text x=\"" << kMarginLeft - 9 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(t)
        << "</text>\n";
  }
  out << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << escape(x_label) << "</text>\n";
  out << "<text x=\"18\" y=\"" << kMarginTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 "
      << kMarginTop + plot_h / 2 << ")\">" << escape(y_label) << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
    for (const auto& [x, y] : series[i].points) {
      out << fmt(sx(x)) << ',' << fmt(sy(y)) << ' ';
    }
    out << "\"/>\n";
    const double ly = kMarginTop + 16.0 + 18.0 * static_cast<double>(i);
    out << "<line x1=\"" << kMarginLeft + plot_w + 10 << "\" y1=\"" << ly << "\" x2=\""
        << kMarginLeft + plot_w + 34 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kMarginLeft + plot_w + 40 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(series[i].name)
        << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw ParseError("write to '" + path + "' failed");
}

void write_trajectory_plot(const std::string& path, const std::string& title,
                           const std::vector<SvgPath>& paths,
                           const std::vector<SvgMarker>& markers) {
  Range xr, yr;
  for (const auto& p : paths) {
    for (const auto& [x, y] : p.points) {
      xr.include(x);
      yr.include(y);
    }
  }
  for (const auto& m : markers) {
    xr.include(m.x - m.radius);
    xr.include(m.x + m.radius);
    yr.include(m.y - m.radius);
    yr.include(m.y + m.radius);
  }
  if (!std::isfinite(xr.lo) || !std::isfinite(yr.lo)) {
    xr = {-1.0, 1.0};
    yr = {-1.0, 1.0};
  }
  xr.pad();
  yr.pad();
  // square aspect
  const double span = std::max(xr.hi - xr.lo, yr.hi - yr.lo);
  const double xc = 0.5 * (xr.lo + xr.hi);
  const double yc = 0.5 * (yr.lo + yr.hi);
  xr = {xc - span / 2, xc + span / 2};
  yr = {yc - span / 2, yc + span / 2};

  const double size = 560.0;
  const double margin = 50.0;
  const double plot = size - 2 * margin;
  const auto sx = [&](double x) { return margin + plot * (x - xr.lo) / (xr.hi - xr.lo); };
  const auto sy = [&](double y) { return margin + plot * (1.0 - (y - yr.lo) / (yr.hi - yr.lo)); };

  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << size / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
      << escape(title) << "</text>\n";
  out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << plot
      << "\" height=\"" << plot << "\" fill=\"none\" stroke=\"#333\"/>\n";

  for (const auto& m : markers) {
    const double r = m.radius * plot / (xr.hi - xr.lo);
    out << "<circle cx=\"" << fmt(sx(m.x)) << "\" cy=\"" << fmt(sy(m.y)) << "\" r=\""
        << fmt(std::max(r, 3.0)) << "\" fill=\"#fce8b2\" stroke=\"#b8860b\"/>\n";
    if (!m.label.empty()) {
      out << "<text x=\"" << fmt(sx(m.x)) << "\" y=\"" << fmt(sy(m.y) - 8)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
          << escape(m.label) << "</text>\n";
    }
  }
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const std::string color = paths[i].color.empty()
                                  ? kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))]
                                  : paths[i].color;
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.2\" stroke-opacity=\"0.75\" points=\"";
    for (const auto& [x, y] : paths[i].points) {
      out << fmt(sx(x)) << ',' << fmt(sy(y)) << ' ';
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
  if (!out) throw ParseError("write to '" + path + "' failed");
}

}  // namespace hilonet
