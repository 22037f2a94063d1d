#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace ampc {

/// One plotted curve. x and y must have equal length. color picks a fixed
/// palette entry; -1 assigns by position, so paired curves (a value and its
/// reference, say) can share a hue.
struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
  int color = -1;
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  int width = 860;
  int height = 520;
};

namespace detail {

inline const char* kPalette[10] = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

inline std::string fmt_px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string fmt_tick(double v) {
  if (std::abs(v) < 1e-12) v = 0.0;  // avoid "-0" and 1e-17 noise labels
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string escape_xml(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

/// Expands degenerate or empty ranges so mapping to pixels is well defined.
inline Range padded(Range r, double fraction = 0.05) {
  if (!(r.lo <= r.hi)) r = {0.0, 1.0};
  double span = r.hi - r.lo;
  if (span < 1e-12) {
    const double pad = std::max(1.0, std::abs(r.lo)) * 0.5;
    return {r.lo - pad, r.hi + pad};
  }
  return {r.lo - fraction * span, r.hi + fraction * span};
}

inline Range data_range(const std::vector<Series>& series, bool along_x) {
  Range r{std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity()};
  for (const auto& s : series)
    for (double v : along_x ? s.x : s.y) {
      r.lo = std::min(r.lo, v);
      r.hi = std::max(r.hi, v);
    }
  if (!(r.lo <= r.hi)) return {0.0, 1.0};
  return r;
}

/// Round tick positions covering [lo, hi] with a 1-2-5 step.
inline std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
  std::vector<double> ticks;
  const double span = hi - lo;
  if (!(span > 0.0) || !std::isfinite(span)) return ticks;
  const double raw = span / std::max(target, 2);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = 10.0 * mag;
  for (double mult : {1.0, 2.0, 5.0}) {
    if (mult * mag >= raw) {
      step = mult * mag;
      break;
    }
  }
  double t = std::ceil(lo / step) * step;
  for (; t <= hi + 0.5 * step * 1e-9 + 1e-300; t += step) {
    ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
    if (ticks.size() > 50) break;  // safety against pathological ranges
  }
  return ticks;
}

struct PlotRect {
  double x0, y0, x1, y1;  // pixel corners, y grows downward
};

inline double map_x(double v, Range r, const PlotRect& p) {
  return p.x0 + (v - r.lo) / (r.hi - r.lo) * (p.x1 - p.x0);
}

inline double map_y(double v, Range r, const PlotRect& p) {
  return p.y1 - (v - r.lo) / (r.hi - r.lo) * (p.y1 - p.y0);
}

inline void draw_frame_and_ticks(std::ostringstream& out, const PlotRect& p,
                                 Range rx, Range ry) {
  out << "<rect x=\"" << fmt_px(p.x0) << "\" y=\"" << fmt_px(p.y0)
      << "\" width=\"" << fmt_px(p.x1 - p.x0) << "\" height=\""
      << fmt_px(p.y1 - p.y0)
      << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
  for (double t : nice_ticks(rx.lo, rx.hi)) {
    const double px = map_x(t, rx, p);
    out << "<line x1=\"" << fmt_px(px) << "\" y1=\"" << fmt_px(p.y1)
        << "\" x2=\"" << fmt_px(px) << "\" y2=\"" << fmt_px(p.y1 + 5)
        << "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << fmt_px(px) << "\" y1=\"" << fmt_px(p.y0)
        << "\" x2=\"" << fmt_px(px) << "\" y2=\"" << fmt_px(p.y1)
        << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
    out << "<text x=\"" << fmt_px(px) << "\" y=\"" << fmt_px(p.y1 + 18)
        << "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#222222\">"
        << fmt_tick(t) << "</text>\n";
  }
  for (double t : nice_ticks(ry.lo, ry.hi)) {
    const double py = map_y(t, ry, p);
    out << "<line x1=\"" << fmt_px(p.x0 - 5) << "\" y1=\"" << fmt_px(py)
        << "\" x2=\"" << fmt_px(p.x0) << "\" y2=\"" << fmt_px(py)
        << "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << fmt_px(p.x0) << "\" y1=\"" << fmt_px(py)
        << "\" x2=\"" << fmt_px(p.x1) << "\" y2=\"" << fmt_px(py)
        << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
    out << "<text x=\"" << fmt_px(p.x0 - 8) << "\" y=\"" << fmt_px(py + 4)
        << "\" font-size=\"11\" text-anchor=\"end\" fill=\"#222222\">"
        << fmt_tick(t) << "</text>\n";
  }
}

inline void draw_polyline(std::ostringstream& out, const Series& s,
                          const char* color, Range rx, Range ry,
                          const PlotRect& p) {
  if (s.x.empty()) return;
  out << "<polyline fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"1.6\"";
  if (s.dashed) out << " stroke-dasharray=\"6 4\"";
  out << " points=\"";
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    if (i) out << ' ';
    out << fmt_px(map_x(s.x[i], rx, p)) << ',' << fmt_px(map_y(s.y[i], ry, p));
  }
  out << "\"/>\n";
}

inline void draw_titles(std::ostringstream& out, const ChartSpec& spec,
                        const PlotRect& p) {
  if (!spec.title.empty())
    out << "<text x=\"" << fmt_px((p.x0 + p.x1) / 2) << "\" y=\"20\""
        << " font-size=\"14\" font-weight=\"bold\" text-anchor=\"middle\""
        << " fill=\"#111111\">" << escape_xml(spec.title) << "</text>\n";
  if (!spec.x_label.empty())
    out << "<text x=\"" << fmt_px((p.x0 + p.x1) / 2) << "\" y=\""
        << fmt_px(p.y1 + 36) << "\" font-size=\"12\" text-anchor=\"middle\""
        << " fill=\"#222222\">" << escape_xml(spec.x_label) << "</text>\n";
  if (!spec.y_label.empty())
    out << "<text x=\"14\" y=\"" << fmt_px((p.y0 + p.y1) / 2)
        << "\" font-size=\"12\" text-anchor=\"middle\""
        << " transform=\"rotate(-90 14 " << fmt_px((p.y0 + p.y1) / 2) << ")\""
        << " fill=\"#222222\">" << escape_xml(spec.y_label) << "</text>\n";
}

inline const char* series_color(const Series& s, std::size_t position) {
  return kPalette[(s.color >= 0 ? static_cast<std::size_t>(s.color)
                                : position) %
                  10];
}

inline void draw_legend(std::ostringstream& out, const ChartSpec& spec,
                        const PlotRect& p) {
  double y = p.y0 + 14;
  for (std::size_t i = 0; i < spec.series.size(); ++i) {
    const auto& s = spec.series[i];
    if (s.label.empty()) continue;
    const char* color = series_color(s, i);
    const double x1 = p.x1 - 130, x2 = p.x1 - 106;
    out << "<line x1=\"" << fmt_px(x1) << "\" y1=\"" << fmt_px(y - 4)
        << "\" x2=\"" << fmt_px(x2) << "\" y2=\"" << fmt_px(y - 4)
        << "\" stroke=\"" << color << "\" stroke-width=\"1.6\"";
    if (s.dashed) out << " stroke-dasharray=\"6 4\"";
    out << "/>\n";
    out << "<text x=\"" << fmt_px(x2 + 6) << "\" y=\"" << fmt_px(y)
        << "\" font-size=\"11\" fill=\"#222222\">" << escape_xml(s.label)
        << "</text>\n";
    y += 16;
  }
}

inline std::string svg_open(int w, int h) {
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h
      << "\">\n<rect width=\"" << w << "\" height=\"" << h
      << "\" fill=\"#ffffff\"/>\n";
  return out.str();
}

}  // namespace detail

/// Renders series against a shared numeric x axis (typically time).
/// Output is deterministic: same input, same bytes.
inline std::string line_chart_svg(const ChartSpec& spec) {
  using namespace detail;
  const PlotRect p{64.0, 32.0, spec.width - 16.0, spec.height - 48.0};
  const Range rx = padded(data_range(spec.series, true), 0.0);
  const Range ry = padded(data_range(spec.series, false));
  std::ostringstream out;
  out << svg_open(spec.width, spec.height);
  draw_frame_and_ticks(out, p, rx, ry);
  for (std::size_t i = 0; i < spec.series.size(); ++i)
    draw_polyline(out, spec.series[i], series_color(spec.series[i], i), rx, ry,
                  p);
  draw_titles(out, spec, p);
  draw_legend(out, spec, p);
  out << "</svg>\n";
  return out.str();
}

/// Renders planar paths with equal axis scaling, marking the start of the
/// first series with a circle and the goal point with a cross.
inline std::string path_chart_svg(const ChartSpec& spec, double goal_x,
                                  double goal_y) {
  using namespace detail;
  const PlotRect p{64.0, 32.0, spec.width - 16.0, spec.height - 48.0};
  Range rx = data_range(spec.series, true);
  Range ry = data_range(spec.series, false);
  rx.lo = std::min(rx.lo, goal_x);
  rx.hi = std::max(rx.hi, goal_x);
  ry.lo = std::min(ry.lo, goal_y);
  ry.hi = std::max(ry.hi, goal_y);
  rx = padded(rx, 0.08);
  ry = padded(ry, 0.08);
  // Equal aspect: widen the axis whose units-per-pixel is finer.
  const double sx = (rx.hi - rx.lo) / (p.x1 - p.x0);
  const double sy = (ry.hi - ry.lo) / (p.y1 - p.y0);
  if (sx > sy) {
    const double grow = (sx - sy) * (p.y1 - p.y0) / 2.0;
    ry.lo -= grow;
    ry.hi += grow;
  } else {
    const double grow = (sy - sx) * (p.x1 - p.x0) / 2.0;
    rx.lo -= grow;
    rx.hi += grow;
  }
  std::ostringstream out;
  out << svg_open(spec.width, spec.height);
  draw_frame_and_ticks(out, p, rx, ry);
  for (std::size_t i = 0; i < spec.series.size(); ++i)
    draw_polyline(out, spec.series[i], series_color(spec.series[i], i), rx, ry,
                  p);
  if (!spec.series.empty() && !spec.series[0].x.empty()) {
    const double cx = map_x(spec.series[0].x.front(), rx, p);
    const double cy = map_y(spec.series[0].y.front(), ry, p);
    out << "<circle cx=\"" << fmt_px(cx) << "\" cy=\"" << fmt_px(cy)
        << "\" r=\"4\" fill=\"#2ca02c\"/>\n";
    out << "<text x=\"" << fmt_px(cx + 7) << "\" y=\"" << fmt_px(cy - 6)
        << "\" font-size=\"11\" fill=\"#2ca02c\">start</text>\n";
  }
  {
    const double gx = map_x(goal_x, rx, p);
    const double gy = map_y(goal_y, ry, p);
    out << "<line x1=\"" << fmt_px(gx - 5) << "\" y1=\"" << fmt_px(gy - 5)
        << "\" x2=\"" << fmt_px(gx + 5) << "\" y2=\"" << fmt_px(gy + 5)
        << "\" stroke=\"#d62728\" stroke-width=\"1.8\"/>\n";
    out << "<line x1=\"" << fmt_px(gx - 5) << "\" y1=\"" << fmt_px(gy + 5)
        << "\" x2=\"" << fmt_px(gx + 5) << "\" y2=\"" << fmt_px(gy - 5)
        << "\" stroke=\"#d62728\" stroke-width=\"1.8\"/>\n";
    out << "<text x=\"" << fmt_px(gx + 7) << "\" y=\"" << fmt_px(gy - 6)
        << "\" font-size=\"11\" fill=\"#d62728\">goal</text>\n";
  }
  draw_titles(out, spec, p);
  draw_legend(out, spec, p);
  out << "</svg>\n";
  return out.str();
}

}  // namespace ampc
