#include "embedshape/pipeline/plot_svg.hpp"

#include <algorithm>
#include <cstdio>

#include "embedshape/common/error.hpp"
#include "embedshape/common/io.hpp"

namespace embedshape {
namespace {

constexpr double kSize = 400.0;
constexpr double kMargin = 50.0;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
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

}  // namespace

std::string render_diagram_svg(const std::vector<PersistenceDiagram>& diagrams, const std::string& title) {
  double hi = 0.0;
  for (const auto& d : diagrams)
    for (const auto& b : d.bars) hi = std::max(hi, b.death);
  if (hi <= 0.0) hi = 1.0;
  hi *= 1.05;
  const double plot = kSize - 2 * kMargin;
  auto x = [&](double v) { return kMargin + v / hi * plot; };
  auto y = [&](double v) { return kSize - kMargin - v / hi * plot; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kSize) + "\" height=\"" + num(kSize) +
       "\" viewBox=\"0 0 " + num(kSize) + " " + num(kSize) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kSize / 2) + "\" y=\"25\" text-anchor=\"middle\" font-size=\"14\">" + escape_xml(title) + "</text>\n";
  s += "<line class=\"axis\" x1=\"" + num(x(0)) + "\" y1=\"" + num(y(0)) + "\" x2=\"" + num(x(hi)) + "\" y2=\"" + num(y(0)) + "\" stroke=\"black\"/>\n";
  s += "<line class=\"axis\" x1=\"" + num(x(0)) + "\" y1=\"" + num(y(0)) + "\" x2=\"" + num(x(0)) + "\" y2=\"" + num(y(hi)) + "\" stroke=\"black\"/>\n";
  s += "<line class=\"diagonal\" x1=\"" + num(x(0)) + "\" y1=\"" + num(y(0)) + "\" x2=\"" + num(x(hi)) + "\" y2=\"" + num(y(hi)) +
       "\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";
  s += "<text x=\"" + num(kSize / 2) + "\" y=\"" + num(kSize - 12) + "\" text-anchor=\"middle\" font-size=\"12\">birth</text>\n";
  s += "<text x=\"15\" y=\"" + num(kSize / 2) + "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 15 " +
       num(kSize / 2) + ")\">death</text>\n";
  s += "<text x=\"" + num(x(hi)) + "\" y=\"" + num(y(0) + 15) + "\" text-anchor=\"end\" font-size=\"10\">" + num(hi) + "</text>\n";

  for (const auto& d : diagrams) {
    PersistenceDiagram sorted = d;
    sorted.normalize();
    const int deg = std::clamp(d.degree, 0, 2);
    const std::string color = kColors[deg];
    for (const auto& b : sorted.bars) {
      const double cx = x(b.birth), cy = y(b.death);
      const std::string cls = "class=\"bar degree" + std::to_string(d.degree) + "\" ";
      if (deg == 0) {
        s += "<circle " + cls + "cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
      } else if (deg == 1) {
        s += "<rect " + cls + "x=\"" + num(cx - 3) + "\" y=\"" + num(cy - 3) + "\" width=\"6\" height=\"6\" fill=\"" + color + "\"/>\n";
      } else {
        s += "<polygon " + cls + "points=\"" + num(cx) + "," + num(cy - 4) + " " + num(cx - 4) + "," + num(cy + 3) + " " +
             num(cx + 4) + "," + num(cy + 3) + "\" fill=\"" + color + "\"/>\n";
      }
    }
  }
  double ly = 45;
  for (const auto& d : diagrams) {
    const int deg = std::clamp(d.degree, 0, 2);
    s += "<text x=\"" + num(kMargin + 5) + "\" y=\"" + num(ly) + "\" font-size=\"11\" fill=\"" + kColors[deg] + "\">H" +
         std::to_string(d.degree) + " (" + std::to_string(d.size()) + ")</text>\n";
    ly += 14;
  }
  s += "</svg>\n";
  return s;
}

void plot_diagram(const std::vector<PersistenceDiagram>& diagrams, const std::filesystem::path& path,
                  const std::string& title) {
  write_file_atomic(path, render_diagram_svg(diagrams, title));
}

}  // namespace embedshape
