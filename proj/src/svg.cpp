#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "netgs/io.hpp"

namespace netgs {

namespace {

std::string f6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

} // namespace

std::string render_svg_plot(const std::string& title,
                            const std::vector<SvgSeries>& series, int width,
                            int height) {
  if (series.empty()) throw std::runtime_error("svg: nothing to plot");
  if (width < 160 || height < 120) throw std::runtime_error("svg: canvas too small");

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const SvgSeries& s : series) {
    if (s.x.size() != s.y.size())
      throw std::runtime_error("svg: series coordinate lengths differ");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!(xmin <= xmax)) throw std::runtime_error("svg: no finite data points");
  if (xmax - xmin <= 0) { xmin -= 0.5; xmax += 0.5; }
  if (ymax - ymin <= 0) { ymin -= 0.5; ymax += 0.5; }

  const double ml = 64, mr = 16, mt = 32, mb = 40;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
     << "\">\n";
  os << "<rect width=\"" << width << "\" height=\"" << height
     << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"13\">"
     << title << "</text>\n";
  os << "<rect x=\"" << f6(ml) << "\" y=\"" << f6(mt) << "\" width=\"" << f6(pw)
     << "\" height=\"" << f6(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";

  const int nticks = 5;
  for (int i = 0; i <= nticks; ++i) {
    const double tx = xmin + (xmax - xmin) * i / nticks;
    const double ty = ymin + (ymax - ymin) * i / nticks;
    const double px = sx(tx), py = sy(ty);
    os << "<line x1=\"" << f6(px) << "\" y1=\"" << f6(mt + ph) << "\" x2=\"" << f6(px)
       << "\" y2=\"" << f6(mt + ph + 4) << "\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << f6(px) << "\" y=\"" << f6(mt + ph + 16)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
       << f6(tx) << "</text>\n";
    os << "<line x1=\"" << f6(ml - 4) << "\" y1=\"" << f6(py) << "\" x2=\"" << f6(ml)
       << "\" y2=\"" << f6(py) << "\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << f6(ml - 6) << "\" y=\"" << f6(py + 3)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
       << f6(ty) << "</text>\n";
  }

  for (std::size_t si = 0; si < series.size(); ++si) {
    const SvgSeries& s = series[si];
    const char* color = kPalette[si % (sizeof kPalette / sizeof kPalette[0])];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (i) os << ' ';
      os << f6(sx(s.x[i])) << ',' << f6(sy(s.y[i]));
    }
    os << "\"/>\n";
    const double ly = mt + 14 + 14 * (double)si;
    os << "<line x1=\"" << f6(ml + pw - 120) << "\" y1=\"" << f6(ly - 4) << "\" x2=\""
       << f6(ml + pw - 104) << "\" y2=\"" << f6(ly - 4) << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << f6(ml + pw - 100) << "\" y=\"" << f6(ly)
       << "\" font-family=\"sans-serif\" font-size=\"10\">" << s.label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

} // namespace netgs
