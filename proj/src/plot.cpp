#include "mpsenc/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <vector>

#include "mpsenc/types.hpp"

namespace mpsenc {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 80, kRight = 150, kTop = 40, kBottom = 60;

const std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                          "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else if (c == '"') out += "&quot;";
    else out += c;
  }
  return out;
}

int require_column(const ResultTable& t, const std::string& name, const char* role) {
  if (name.empty()) throw Error(ErrorCode::invalid_argument, std::string("plot: no ") + role + " column given");
  const int c = t.column(name);
  if (c < 0) throw Error(ErrorCode::invalid_argument, "plot: table has no column '" + name + "'");
  return c;
}

double parse_number(const std::string& s, const std::string& column) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::invalid_argument, "plot: non-numeric value '" + s + "' in column '" + column + "'");
}

bool auto_log(const std::vector<double>& v, const std::optional<bool>& forced) {
  if (forced) return *forced;
  if (v.empty()) return false;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo > 0 && *hi / *lo > 100;
}

// Maps data values onto [0, 1], linearly or by decade.
struct Scale {
  double lo = 0, hi = 1;
  bool log = false;

  static Scale fit(const std::vector<double>& v, bool log) {
    Scale s;
    s.log = log;
    if (v.empty()) return s;
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    s.lo = log ? std::log10(*lo) : *lo;
    s.hi = log ? std::log10(*hi) : *hi;
    if (log) {
      s.lo = std::floor(s.lo);
      s.hi = std::ceil(s.hi);
    }
    if (s.hi - s.lo < 1e-300) s.lo -= 0.5, s.hi += 0.5;
    return s;
  }
  double operator()(double v) const { return ((log ? std::log10(v) : v) - lo) / (hi - lo); }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      const int step = std::max(1, static_cast<int>(std::ceil((hi - lo) / 8)));
      for (double e = lo; e <= hi + 1e-9; e += step) out.push_back(std::pow(10.0, e));
      return out;
    }
    const double raw = (hi - lo) / 5;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {2.0, 5.0, 10.0})
      if (raw > step) step = m * mag;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) out.push_back(v);
    return out;
  }
};

std::string tick_label(double v, bool log) {
  if (log) return fmt("1e%.0f", std::log10(v));
  return fmt("%g", std::abs(v) < 1e-12 ? 0.0 : v);
}

double mean(const std::vector<double>& v, bool log) {
  double s = 0;
  for (double x : v) s += log ? std::log(x) : x;
  s /= static_cast<double>(v.size());
  return log ? std::exp(s) : s;
}

std::string header(const std::string& title) {
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%.0f", kWidth) + "\" height=\"" +
       fmt("%.0f", kHeight) + "\" viewBox=\"0 0 " + fmt("%.0f", kWidth) + " " + fmt("%.0f", kHeight) +
       "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty())
    s += "<text class=\"title\" x=\"" + fmt("%.1f", kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
         escape(title) + "</text>\n";
  return s;
}

std::string axis_labels(const std::string& x, const std::string& y) {
  const double cx = kLeft + (kWidth - kLeft - kRight) / 2, cy = kTop + (kHeight - kTop - kBottom) / 2;
  return "<text class=\"xlabel\" x=\"" + fmt("%.1f", cx) + "\" y=\"" + fmt("%.1f", kHeight - 15) +
         "\" text-anchor=\"middle\">" + escape(x) + "</text>\n" + "<text class=\"ylabel\" x=\"20\" y=\"" +
         fmt("%.1f", cy) + "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " + fmt("%.1f", cy) + ")\">" +
         escape(y) + "</text>\n";
}

double px(double u) { return kLeft + u * (kWidth - kLeft - kRight); }
double py(double u) { return kHeight - kBottom - u * (kHeight - kTop - kBottom); }

std::string lines_plot(const ResultTable& t, const PlotOptions& o) {
  const int cx = require_column(t, o.x, "x"), cy = require_column(t, o.y, "y");
  const int cs = o.series.empty() ? -1 : require_column(t, o.series, "series");

  std::vector<double> xs, ys;
  for (const auto& r : t.rows) {
    xs.push_back(parse_number(r[cx], o.x));
    ys.push_back(parse_number(r[cy], o.y));
  }
  const bool log_x = auto_log(xs, o.log_x), log_y = auto_log(ys, o.log_y);
  for (double v : log_x ? xs : std::vector<double>{})
    if (v <= 0) throw Error(ErrorCode::invalid_argument, "plot: log x axis needs positive values");
  for (double v : log_y ? ys : std::vector<double>{})
    if (v <= 0) throw Error(ErrorCode::invalid_argument, "plot: log y axis needs positive values");

  // series in order of first appearance; points averaged per x
  std::vector<std::string> names;
  std::map<std::string, std::map<double, std::vector<double>>> points;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string name = cs < 0 ? o.y : t.rows[i][cs];
    if (!points.count(name)) names.push_back(name);
    points[name][xs[i]].push_back(ys[i]);
  }
  std::vector<double> mean_ys;
  for (auto& [name, byx] : points)
    for (auto& [x, v] : byx) mean_ys.push_back(mean(v, log_y));
  const Scale sx = Scale::fit(xs, log_x), sy = Scale::fit(mean_ys.empty() ? ys : mean_ys, log_y);

  std::string s = header(o.title);
  s += "<g class=\"axes\" stroke=\"black\" fill=\"none\"><rect x=\"" + fmt("%.1f", kLeft) + "\" y=\"" + fmt("%.1f", kTop) +
       "\" width=\"" + fmt("%.1f", kWidth - kLeft - kRight) + "\" height=\"" + fmt("%.1f", kHeight - kTop - kBottom) +
       "\"/></g>\n";
  for (double v : sx.ticks())
    s += "<text class=\"xtick\" x=\"" + fmt("%.1f", px(sx(v))) + "\" y=\"" + fmt("%.1f", kHeight - kBottom + 16) +
         "\" text-anchor=\"middle\">" + tick_label(v, log_x) + "</text>\n";
  for (double v : sy.ticks())
    s += "<text class=\"ytick\" x=\"" + fmt("%.1f", kLeft - 6) + "\" y=\"" + fmt("%.1f", py(sy(v)) + 4) +
         "\" text-anchor=\"end\">" + tick_label(v, log_y) + "</text>\n";
  s += axis_labels(o.x + (log_x ? " (log)" : ""), o.y + (log_y ? " (log)" : ""));

  for (std::size_t k = 0; k < names.size(); ++k) {
    const char* color = kPalette[k % kPalette.size()];
    std::string pts;
    std::string marks;
    for (const auto& [x, v] : points[names[k]]) {
      const double X = px(sx(x)), Y = py(sy(mean(v, log_y)));
      pts += fmt("%.2f", X) + "," + fmt("%.2f", Y) + " ";
      marks += "<circle cx=\"" + fmt("%.2f", X) + "\" cy=\"" + fmt("%.2f", Y) + "\" r=\"3\" fill=\"" + color + "\"/>";
    }
    s += "<polyline class=\"series\" fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" points=\"" +
         pts + "\"/>\n" + marks + "\n";
    const double ly = kTop + 10 + 18 * static_cast<double>(k);
    s += "<g class=\"legend-entry\"><line x1=\"" + fmt("%.1f", kWidth - kRight + 12) + "\" x2=\"" +
         fmt("%.1f", kWidth - kRight + 32) + "\" y1=\"" + fmt("%.1f", ly) + "\" y2=\"" + fmt("%.1f", ly) +
         "\" stroke=\"" + color + "\" stroke-width=\"2\"/><text x=\"" + fmt("%.1f", kWidth - kRight + 38) + "\" y=\"" +
         fmt("%.1f", ly + 4) + "\">" + escape(names[k]) + "</text></g>\n";
  }
  return s + "</svg>\n";
}

// Distinct values of a column, numerically sorted when all are numbers.
std::vector<std::string> categories(const ResultTable& t, int c) {
  std::vector<std::string> out;
  for (const auto& r : t.rows)
    if (std::find(out.begin(), out.end(), r[c]) == out.end()) out.push_back(r[c]);
  bool numeric = true;
  for (const auto& v : out) {
    try {
      std::size_t used = 0;
      std::stod(v, &used);
      numeric = numeric && used == v.size();
    } catch (const std::exception&) {
      numeric = false;
    }
  }
  if (numeric)
    std::stable_sort(out.begin(), out.end(), [](const std::string& a, const std::string& b) { return std::stod(a) < std::stod(b); });
  return out;
}

std::string heatmap_plot(const ResultTable& t, const PlotOptions& o) {
  const int cx = require_column(t, o.x, "x"), cy = require_column(t, o.y, "y");
  const int cv = require_column(t, o.value, "value");
  const auto xcats = categories(t, cx), ycats = categories(t, cy);

  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> cells;
  std::vector<double> all;
  for (const auto& r : t.rows) {
    const auto ix = static_cast<std::size_t>(std::find(xcats.begin(), xcats.end(), r[cx]) - xcats.begin());
    const auto iy = static_cast<std::size_t>(std::find(ycats.begin(), ycats.end(), r[cy]) - ycats.begin());
    const double v = parse_number(r[cv], o.value);
    cells[{ix, iy}].push_back(v);
    all.push_back(v);
  }
  const bool log_v = auto_log(all, o.log_value);
  std::vector<double> means;
  std::map<std::pair<std::size_t, std::size_t>, double> value;
  for (auto& [key, v] : cells) means.push_back(value[key] = mean(v, log_v));
  Scale sv = Scale::fit(means, log_v);
  if (!means.empty()) {
    auto [lo, hi] = std::minmax_element(means.begin(), means.end());
    sv.lo = log_v ? std::log10(*lo) : *lo;
    sv.hi = log_v ? std::log10(*hi) : *hi;
    if (sv.hi - sv.lo < 1e-300) sv.lo -= 0.5, sv.hi += 0.5;
  }

  std::string s = header(o.title);
  const double w = (kWidth - kLeft - kRight) / std::max<std::size_t>(1, xcats.size());
  const double h = (kHeight - kTop - kBottom) / std::max<std::size_t>(1, ycats.size());
  for (const auto& [key, v] : value) {
    const double x = kLeft + w * static_cast<double>(key.first);
    const double y = kHeight - kBottom - h * static_cast<double>(key.second + 1);
    s += "<rect class=\"cell\" x=\"" + fmt("%.2f", x) + "\" y=\"" + fmt("%.2f", y) + "\" width=\"" + fmt("%.2f", w) +
         "\" height=\"" + fmt("%.2f", h) + "\" fill=\"" + heat_color(sv(v)) + "\"><title>" + fmt("%.6g", v) +
         "</title></rect>\n";
  }
  for (std::size_t i = 0; i < xcats.size(); ++i)
    s += "<text class=\"xtick\" x=\"" + fmt("%.1f", kLeft + w * (static_cast<double>(i) + 0.5)) + "\" y=\"" +
         fmt("%.1f", kHeight - kBottom + 16) + "\" text-anchor=\"middle\">" + escape(xcats[i]) + "</text>\n";
  for (std::size_t i = 0; i < ycats.size(); ++i)
    s += "<text class=\"ytick\" x=\"" + fmt("%.1f", kLeft - 6) + "\" y=\"" +
         fmt("%.1f", kHeight - kBottom - h * (static_cast<double>(i) + 0.5) + 4) + "\" text-anchor=\"end\">" +
         escape(ycats[i]) + "</text>\n";
  s += axis_labels(o.x, o.y);

  // colour bar
  const double bx = kWidth - kRight + 30, bh = kHeight - kTop - kBottom;
  constexpr int kSteps = 32;
  for (int k = 0; k < kSteps; ++k) {
    const double t0 = static_cast<double>(k) / kSteps;
    s += "<rect class=\"colorbar\" x=\"" + fmt("%.1f", bx) + "\" y=\"" + fmt("%.2f", kTop + bh * (1 - t0 - 1.0 / kSteps)) +
         "\" width=\"16\" height=\"" + fmt("%.2f", bh / kSteps + 0.5) + "\" fill=\"" + heat_color(t0 + 0.5 / kSteps) +
         "\"/>\n";
  }
  auto bar_label = [&](double u, double e) {
    const double v = log_v ? std::pow(10.0, e) : e;
    s += "<text class=\"colorbar-label\" x=\"" + fmt("%.1f", bx + 22) + "\" y=\"" + fmt("%.1f", kTop + bh * (1 - u) + 4) +
         "\">" + fmt("%.3g", v) + "</text>\n";
  };
  bar_label(0, sv.lo);
  bar_label(1, sv.hi);
  s += "<text class=\"colorbar-title\" x=\"" + fmt("%.1f", bx) + "\" y=\"" + fmt("%.1f", kTop - 8) + "\">" +
       escape(o.value) + (log_v ? " (log)" : "") + "</text>\n";
  return s + "</svg>\n";
}

}  // namespace

PlotKind parse_plot_kind(const std::string& s) {
  if (s == "lines") return PlotKind::lines;
  if (s == "heatmap") return PlotKind::heatmap;
  throw Error(ErrorCode::invalid_argument, "unknown plot kind '" + s + "'");
}

std::string heat_color(double t) {
  // light yellow to dark blue, luminance decreasing
  static const std::array<std::array<double, 3>, 5> stops{{{255, 255, 204}, {161, 218, 180}, {65, 182, 196},
                                                           {44, 127, 184}, {37, 52, 148}}};
  t = std::clamp(t, 0.0, 1.0) * (stops.size() - 1);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
  const double f = t - static_cast<double>(i);
  char buf[8];
  int rgb[3];
  for (int k = 0; k < 3; ++k) rgb[k] = static_cast<int>(std::lround(stops[i][k] + f * (stops[i + 1][k] - stops[i][k])));
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

std::string emit_plot(const ResultTable& table, const PlotOptions& options) {
  return options.kind == PlotKind::lines ? lines_plot(table, options) : heatmap_plot(table, options);
}

}  // namespace mpsenc
