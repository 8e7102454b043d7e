#pragma once

#include <optional>
#include <string>

#include "mpsenc/benchmarks.hpp"

namespace mpsenc {

enum class PlotKind { lines, heatmap };
PlotKind parse_plot_kind(const std::string& s);

struct PlotOptions {
  PlotKind kind = PlotKind::lines;
  std::string x;
  std::string y;
  /// lines: rows are grouped by this column (empty: one series).
  std::string series;
  /// heatmap: column mapped to colour.
  std::string value;
  /// Unset: log scale when every value is positive and they span > 2 decades.
  std::optional<bool> log_x, log_y, log_value;
  std::string title;
};

/// Standalone SVG document. Rows sharing a point (e.g. several seeds) are
/// averaged, geometrically on log axes.
std::string emit_plot(const ResultTable& table, const PlotOptions& options);

/// Sequential colour for t in [0, 1], light to dark, as "#rrggbb".
std::string heat_color(double t);

}  // namespace mpsenc
