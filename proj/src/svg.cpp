#include "lgallee/svg.hpp"

#include <array>
#include <cmath>
#include <cstdio>

namespace lgallee {

namespace {

std::string num(double x) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.2f", x);
  return buf.data();
}

constexpr std::array<std::string_view, 8> colors = {"#e6862e", "#8c8c8c", "#2a6fb5", "#4f9a3a",
                                                    "#b03a8c", "#c9b12b", "#5bb5c9", "#7a4a2a"};

} // namespace

Glyph glyph_for(EquilibriumKind k) {
  switch (k) {
  case EquilibriumKind::attractor: return Glyph::attractor;
  case EquilibriumKind::repeller: return Glyph::repeller;
  case EquilibriumKind::saddle:
  case EquilibriumKind::nonhyperbolic_saddle: return Glyph::saddle;
  case EquilibriumKind::stable_saddle_node:
  case EquilibriumKind::unstable_saddle_node: return Glyph::saddle_node;
  default: return Glyph::other;
  }
}

std::string xml_escape(std::string_view s) {
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

std::string_view palette(std::size_t i) { return colors[i % colors.size()]; }

SvgCanvas::SvgCanvas(double x_min, double x_max, double y_min, double y_max)
    : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max) {}

double SvgCanvas::px(double x) const { return margin + (x - x_min_) / (x_max_ - x_min_) * (size - 2 * margin); }
double SvgCanvas::py(double y) const { return size - margin - (y - y_min_) / (y_max_ - y_min_) * (size - 2 * margin); }

bool SvgCanvas::visible(State p) const {
  return p.u >= x_min_ && p.u <= x_max_ && p.v >= y_min_ && p.v <= y_max_;
}

void SvgCanvas::axes(std::string_view x_label, std::string_view y_label, int ticks) {
  const double lo = margin;
  const double hi = size - margin;
  body_ += "<rect x=\"" + num(lo) + "\" y=\"" + num(lo) + "\" width=\"" + num(hi - lo) + "\" height=\"" +
           num(hi - lo) + "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  for (int k = 0; k < ticks; ++k) {
    const double fx = x_min_ + (x_max_ - x_min_) * k / (ticks - 1);
    const double fy = y_min_ + (y_max_ - y_min_) * k / (ticks - 1);
    const double X = px(fx);
    const double Y = py(fy);
    body_ += "<line x1=\"" + num(X) + "\" y1=\"" + num(hi) + "\" x2=\"" + num(X) + "\" y2=\"" + num(hi + 5) +
             "\" stroke=\"#000000\"/>\n";
    body_ += "<text x=\"" + num(X) + "\" y=\"" + num(hi + 20) + "\" font-size=\"12\" text-anchor=\"middle\">" +
             num(fx) + "</text>\n";
    body_ += "<line x1=\"" + num(lo - 5) + "\" y1=\"" + num(Y) + "\" x2=\"" + num(lo) + "\" y2=\"" + num(Y) +
             "\" stroke=\"#000000\"/>\n";
    body_ += "<text x=\"" + num(lo - 8) + "\" y=\"" + num(Y + 4) + "\" font-size=\"12\" text-anchor=\"end\">" +
             num(fy) + "</text>\n";
  }
  body_ += "<text x=\"" + num(size / 2.0) + "\" y=\"" + num(size - 15.0) +
           "\" font-size=\"16\" text-anchor=\"middle\">" + xml_escape(x_label) + "</text>\n";
  body_ += "<text x=\"18\" y=\"" + num(size / 2.0) + "\" font-size=\"16\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
           num(size / 2.0) + ")\">" + xml_escape(y_label) + "</text>\n";
}

void SvgCanvas::title(std::string_view t) {
  body_ += "<text x=\"" + num(size / 2.0) + "\" y=\"30\" font-size=\"16\" text-anchor=\"middle\">" + xml_escape(t) +
           "</text>\n";
}

void SvgCanvas::polyline(const std::vector<State>& pts, std::string_view color, double width, bool dashed,
                         bool closed) {
  // Split at points outside the plot rectangle so nothing is drawn over the margins.
  std::vector<std::string> runs;
  std::string cur;
  std::size_t count = 0;
  auto flush = [&] {
    if (count >= 2) {
      runs.push_back(cur);
    }
    cur.clear();
    count = 0;
  };
  for (const State& p : pts) {
    if (!is_finite(p) || !visible(p)) {
      flush();
      continue;
    }
    if (count > 0) {
      cur += ' ';
    }
    cur += num(px(p.u)) + ',' + num(py(p.v));
    ++count;
  }
  const bool whole = runs.empty() && count == pts.size();
  flush();
  const std::string style = "fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"" + num(width) + "\"" +
                            (dashed ? " stroke-dasharray=\"6,4\"" : "");
  for (const auto& r : runs) {
    body_ += std::string(closed && whole ? "<polygon" : "<polyline") + " points=\"" + r + "\" " + style + "/>\n";
  }
}

void SvgCanvas::glyph(State at, Glyph g, std::string_view color, double r) {
  if (!visible(at)) {
    return;
  }
  const std::string X = num(px(at.u));
  const std::string Y = num(py(at.v));
  const std::string c(color);
  switch (g) {
  case Glyph::attractor:
    body_ += "<circle cx=\"" + X + "\" cy=\"" + Y + "\" r=\"" + num(r) + "\" fill=\"" + c + "\" stroke=\"" + c + "\"/>\n";
    break;
  case Glyph::repeller:
    body_ += "<circle cx=\"" + X + "\" cy=\"" + Y + "\" r=\"" + num(r) + "\" fill=\"#ffffff\" stroke=\"" + c +
             "\" stroke-width=\"2\"/>\n";
    break;
  case Glyph::saddle: {
    const double x = px(at.u);
    const double y = py(at.v);
    body_ += "<path d=\"M" + num(x - r) + ',' + num(y - r) + " L" + num(x + r) + ',' + num(y + r) + " M" + num(x - r) +
             ',' + num(y + r) + " L" + num(x + r) + ',' + num(y - r) + "\" stroke=\"" + c +
             "\" stroke-width=\"2.5\" fill=\"none\"/>\n";
    break;
  }
  case Glyph::saddle_node: {
    const double x = px(at.u);
    const double y = py(at.v);
    body_ += "<circle cx=\"" + X + "\" cy=\"" + Y + "\" r=\"" + num(r) + "\" fill=\"#ffffff\" stroke=\"" + c +
             "\" stroke-width=\"2\"/>\n";
    body_ += "<path d=\"M" + num(x) + ',' + num(y - r) + " A" + num(r) + ',' + num(r) + " 0 0,0 " + num(x) + ',' +
             num(y + r) + " Z\" fill=\"" + c + "\"/>\n";
    break;
  }
  case Glyph::other:
    body_ += "<rect x=\"" + num(px(at.u) - r / 2) + "\" y=\"" + num(py(at.v) - r / 2) + "\" width=\"" + num(r) +
             "\" height=\"" + num(r) + "\" fill=\"" + c + "\"/>\n";
    break;
  }
}

void SvgCanvas::rect(double x0, double y0, double x1, double y1, std::string_view fill) {
  const double X0 = px(x0);
  const double X1 = px(x1);
  const double Y0 = py(y1);
  const double Y1 = py(y0);
  body_ += "<rect x=\"" + num(X0) + "\" y=\"" + num(Y0) + "\" width=\"" + num(X1 - X0) + "\" height=\"" +
           num(Y1 - Y0) + "\" fill=\"" + std::string(fill) + "\" stroke=\"none\"/>\n";
}

void SvgCanvas::text(State at, std::string_view s, int font_size) {
  body_ += "<text x=\"" + num(px(at.u)) + "\" y=\"" + num(py(at.v)) + "\" font-size=\"" + std::to_string(font_size) +
           "\">" + xml_escape(s) + "</text>\n";
}

void SvgCanvas::legend_line(std::string_view label, std::string_view color, bool dashed) {
  const double x = size - margin - 170.0;
  const double y = margin + 18.0 + 18.0 * legend_rows_++;
  body_ += "<line x1=\"" + num(x) + "\" y1=\"" + num(y) + "\" x2=\"" + num(x + 24) + "\" y2=\"" + num(y) +
           "\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\"" + (dashed ? " stroke-dasharray=\"6,4\"" : "") +
           "/>\n";
  body_ += "<text x=\"" + num(x + 30) + "\" y=\"" + num(y + 4) + "\" font-size=\"12\">" + xml_escape(label) +
           "</text>\n";
}

void SvgCanvas::legend_glyph(std::string_view label, Glyph g) {
  const double x = size - margin - 170.0;
  const double y = margin + 18.0 + 18.0 * legend_rows_++;
  const State at{x_min_ + (x + 12 - margin) / (size - 2 * margin) * (x_max_ - x_min_),
                 y_min_ + (size - margin - y) / (size - 2 * margin) * (y_max_ - y_min_)};
  glyph(at, g, "#000000", 5.0);
  body_ += "<text x=\"" + num(x + 30) + "\" y=\"" + num(y + 4) + "\" font-size=\"12\">" + xml_escape(label) +
           "</text>\n";
}

std::string SvgCanvas::str() const {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"0 0 800 800\">\n"
         "<rect x=\"0\" y=\"0\" width=\"800\" height=\"800\" fill=\"#ffffff\"/>\n" +
         body_ + "</svg>\n";
}

} // namespace lgallee
