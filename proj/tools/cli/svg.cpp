#include "cli/svg.hpp"

#include <algorithm>
#include <cstdio>

namespace landmark2vec::cli {

namespace {

constexpr double kPanel = 420.0;
constexpr double kMargin = 36.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<PlotPanel>& panels) {
  const double width = kPanel * static_cast<double>(std::max<std::size_t>(panels.size(), 1));
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) + "\" height=\"" + fmt(kPanel) +
         "\" viewBox=\"0 0 " + fmt(width) + " " + fmt(kPanel) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto& map = panels[p].map;
    const double x0 = kPanel * static_cast<double>(p);
    svg += "<g class=\"panel\">\n";
    svg += "<rect x=\"" + fmt(x0 + 4) + "\" y=\"4\" width=\"" + fmt(kPanel - 8) + "\" height=\"" + fmt(kPanel - 8) +
           "\" fill=\"none\" stroke=\"#999\"/>\n";
    svg += "<text class=\"title\" x=\"" + fmt(x0 + kPanel / 2) + "\" y=\"22\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"14\">" + escape(panels[p].title) + "</text>\n";
    if (map.size() == 0) {
      svg += "</g>\n";
      continue;
    }

    const auto& c = map.coords();
    const double min_x = c.col(0).minCoeff(), max_x = c.col(0).maxCoeff();
    const double min_y = c.col(1).minCoeff(), max_y = c.col(1).maxCoeff();
    // Equal aspect so the map's shape is not distorted.
    const double span = std::max({max_x - min_x, max_y - min_y, 1e-12});
    const double s = (kPanel - 2 * kMargin) / span;
    const double cx = 0.5 * (min_x + max_x), cy = 0.5 * (min_y + max_y);

    for (std::size_t l = 0; l < map.size(); ++l) {
      const auto row = static_cast<Eigen::Index>(l);
      const double px = x0 + kPanel / 2 + s * (c(row, 0) - cx);
      const double py = kPanel / 2 + 8 - s * (c(row, 1) - cy);
      svg += "<circle cx=\"" + fmt(px) + "\" cy=\"" + fmt(py) + "\" r=\"3.5\" fill=\"#1f77b4\"/>\n";
      svg += "<text class=\"label\" x=\"" + fmt(px + 5) + "\" y=\"" + fmt(py - 5) +
             "\" font-family=\"sans-serif\" font-size=\"10\">" + std::to_string(map.ids()[l]) + "</text>\n";
    }
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace landmark2vec::cli
