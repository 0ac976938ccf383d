#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lgallee/equilibria.hpp"
#include "lgallee/plane.hpp"

namespace lgallee {

enum class Glyph { attractor, repeller, saddle, saddle_node, other };

/// attractor filled disk, repeller open disk, saddle cross, saddle-node half
/// filled disk; everything else a small square.
Glyph glyph_for(EquilibriumKind k);

/// 800x800 SVG document drawing data coordinates in a fixed rectangle.
/// Numbers are printed with fixed precision so output is deterministic.
class SvgCanvas {
public:
  static constexpr int size = 800;
  static constexpr int margin = 60;

  SvgCanvas(double x_min, double x_max, double y_min, double y_max);

  void axes(std::string_view x_label, std::string_view y_label, int ticks = 11);
  void title(std::string_view text);
  void polyline(const std::vector<State>& pts, std::string_view color, double width = 1.5, bool dashed = false,
                bool closed = false);
  void glyph(State at, Glyph g, std::string_view color = "#000000", double radius = 6.0);
  /// Data-space rectangle.
  void rect(double x0, double y0, double x1, double y1, std::string_view fill);
  void text(State at, std::string_view s, int font_size = 14);
  /// Legend entries stack down the upper-right corner.
  void legend_line(std::string_view label, std::string_view color, bool dashed);
  void legend_glyph(std::string_view label, Glyph g);

  double px(double x) const;
  double py(double y) const;
  bool visible(State p) const;

  std::string str() const;

private:
  double x_min_, x_max_, y_min_, y_max_;
  std::string body_;
  int legend_rows_ = 0;
};

/// Escapes &, <, > and quotes.
std::string xml_escape(std::string_view s);

/// Fixed categorical palette; index wraps.
std::string_view palette(std::size_t i);

} // namespace lgallee
