#ifndef REACHTRACK_IO_SVG_HPP
#define REACHTRACK_IO_SVG_HPP

// Minimal static SVG charts: stacked panels with polylines, bars and guide
// lines. Output depends only on the data (fixed formatting, no timestamps).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reachtrack/experiments.hpp"
#include "reachtrack/io/csv.hpp"

namespace reachtrack::io {

inline constexpr const char* kQpColor = "#1f77b4";
inline constexpr const char* kPpColor = "#ff7f0e";
inline constexpr const char* kRefColor = "#000000";

inline const char* color_of(Controller c) { return c == Controller::qp ? kQpColor : kPpColor; }
inline const char* label_of(Controller c) { return c == Controller::qp ? "QP+reachability" : "pure pursuit"; }

struct Series {
  std::vector<double> x, y;
  std::string color = kRefColor;
  std::string label;
  bool dashed = false;
  double width = 1.5;
};

struct BarSet {
  double lo = 0.0;
  double width = 1.0;
  std::vector<std::size_t> counts;
  std::string color = kQpColor;
  std::string label;
};

struct Panel {
  std::string title, xlabel, ylabel;
  std::vector<Series> lines;
  std::vector<BarSet> bars;
  std::vector<double> vlines;  // dashed guides at these x
  std::vector<double> hlines;  // dashed guides at these y
  bool equal_aspect = false;
};

namespace svg_detail {

inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

inline std::string tick_label(double x, double step) {
  char buf[32];
  const int decimals = std::clamp(static_cast<int>(std::ceil(-std::log10(step))), 0, 6);
  std::snprintf(buf, sizeof buf, "%.*f", decimals, std::abs(x) < 0.5 * step * 1e-6 ? 0.0 : x);
  return buf;
}

inline std::string escape(const std::string& s) {
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

inline double nice_step(double span, int target) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return (f < 1.5 ? 1.0 : f < 3.0 ? 2.0 : f < 7.0 ? 5.0 : 10.0) * mag;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double x) {
    if (!std::isfinite(x)) return;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  void finish() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) {
      const double pad = std::max(std::abs(lo) * 0.1, 0.5);
      lo -= pad;
      hi += pad;
    } else {
      const double pad = 0.05 * (hi - lo);
      lo -= pad;
      hi += pad;
    }
  }
};

}  // namespace svg_detail

/// Panels stacked vertically, one shared canvas width.
inline std::string render_svg(std::span<const Panel> panels, int width = 720, int panel_height = 300) {
  using namespace svg_detail;
  const double ml = 70, mr = 20, mt = 30, mb = 45;
  const int height = panel_height * static_cast<int>(panels.size());
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
       std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) + " " + std::to_string(height) +
       "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const Panel& P = panels[pi];
    const double top = static_cast<double>(pi) * panel_height;
    double x0 = ml, x1 = width - mr, y0 = top + mt, y1 = top + panel_height - mb;

    Range rx, ry;
    for (const auto& l : P.lines) {
      for (double x : l.x) rx.add(x);
      for (double y : l.y) ry.add(y);
    }
    for (const auto& b : P.bars) {
      rx.add(b.lo);
      rx.add(b.lo + b.width * static_cast<double>(b.counts.size()));
      ry.add(0.0);
      for (auto c : b.counts) ry.add(static_cast<double>(c));
    }
    for (double v : P.vlines) rx.add(v);
    for (double h : P.hlines) ry.add(h);
    rx.finish();
    ry.finish();
    if (P.equal_aspect) {
      // Shrink the plot box so one data unit has the same length on both axes.
      const double sx = (x1 - x0) / (rx.hi - rx.lo), sy = (y1 - y0) / (ry.hi - ry.lo);
      const double k = std::min(sx, sy);
      const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
      x0 = cx - 0.5 * k * (rx.hi - rx.lo);
      x1 = cx + 0.5 * k * (rx.hi - rx.lo);
      y0 = cy - 0.5 * k * (ry.hi - ry.lo);
      y1 = cy + 0.5 * k * (ry.hi - ry.lo);
    }
    auto X = [&](double x) { return x0 + (x - rx.lo) / (rx.hi - rx.lo) * (x1 - x0); };
    auto Y = [&](double y) { return y1 - (y - ry.lo) / (ry.hi - ry.lo) * (y1 - y0); };

    s += "<g>\n";
    s += "<rect x=\"" + num(x0) + "\" y=\"" + num(y0) + "\" width=\"" + num(x1 - x0) + "\" height=\"" + num(y1 - y0) +
         "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";

    const double xs = nice_step(rx.hi - rx.lo, 6), ys = nice_step(ry.hi - ry.lo, 5);
    for (double t = std::ceil(rx.lo / xs) * xs; t <= rx.hi + 1e-12 * xs; t += xs) {
      s += "<line x1=\"" + num(X(t)) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(X(t)) + "\" y2=\"" + num(y1 + 4) +
           "\" stroke=\"#444\"/>\n";
      s += "<text x=\"" + num(X(t)) + "\" y=\"" + num(y1 + 16) + "\" text-anchor=\"middle\">" + tick_label(t, xs) +
           "</text>\n";
    }
    for (double t = std::ceil(ry.lo / ys) * ys; t <= ry.hi + 1e-12 * ys; t += ys) {
      s += "<line x1=\"" + num(x0 - 4) + "\" y1=\"" + num(Y(t)) + "\" x2=\"" + num(x0) + "\" y2=\"" + num(Y(t)) +
           "\" stroke=\"#444\"/>\n";
      s += "<text x=\"" + num(x0 - 6) + "\" y=\"" + num(Y(t) + 4) + "\" text-anchor=\"end\">" + tick_label(t, ys) +
           "</text>\n";
    }
    if (!P.title.empty()) {
      s += "<text x=\"" + num(0.5 * (x0 + x1)) + "\" y=\"" + num(top + 18) +
           "\" text-anchor=\"middle\" font-size=\"13\">" + escape(P.title) + "</text>\n";
    }
    if (!P.xlabel.empty()) {
      s += "<text x=\"" + num(0.5 * (x0 + x1)) + "\" y=\"" + num(y1 + 34) + "\" text-anchor=\"middle\">" +
           escape(P.xlabel) + "</text>\n";
    }
    if (!P.ylabel.empty()) {
      const double cy = 0.5 * (y0 + y1);
      s += "<text x=\"16\" y=\"" + num(cy) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " + num(cy) +
           ")\">" + escape(P.ylabel) + "</text>\n";
    }

    for (const auto& b : P.bars) {
      for (std::size_t i = 0; i < b.counts.size(); ++i) {
        if (b.counts[i] == 0) continue;
        const double l = b.lo + b.width * static_cast<double>(i);
        const double xa = X(l), xb = X(l + b.width), yt = Y(static_cast<double>(b.counts[i]));
        s += "<rect x=\"" + num(xa) + "\" y=\"" + num(yt) + "\" width=\"" + num(std::max(xb - xa - 1.0, 1.0)) +
             "\" height=\"" + num(Y(0.0) - yt) + "\" fill=\"" + b.color + "\" fill-opacity=\"0.8\"/>\n";
      }
    }
    for (double v : P.vlines) {
      s += "<line x1=\"" + num(X(v)) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(X(v)) + "\" y2=\"" + num(y1) +
           "\" stroke=\"#000\" stroke-dasharray=\"5,4\"/>\n";
    }
    for (double h : P.hlines) {
      s += "<line x1=\"" + num(x0) + "\" y1=\"" + num(Y(h)) + "\" x2=\"" + num(x1) + "\" y2=\"" + num(Y(h)) +
           "\" stroke=\"#000\" stroke-dasharray=\"5,4\"/>\n";
    }
    for (const auto& l : P.lines) {
      if (l.x.empty()) continue;
      s += "<polyline fill=\"none\" stroke=\"" + l.color + "\" stroke-width=\"" + num(l.width) + "\"";
      if (l.dashed) s += " stroke-dasharray=\"6,4\"";
      s += " points=\"";
      const std::size_t n = std::min(l.x.size(), l.y.size());
      for (std::size_t i = 0; i < n; ++i) {
        if (i) s += ' ';
        s += num(X(l.x[i])) + "," + num(Y(l.y[i]));
      }
      s += "\"/>\n";
    }

    // Legend, top-right corner of the plot box.
    double ly = y0 + 14;
    auto legend = [&](const std::string& label, const std::string& color, bool dashed) {
      if (label.empty()) return;
      s += "<line x1=\"" + num(x1 - 150) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(x1 - 128) + "\" y2=\"" +
           num(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"" +
           (dashed ? " stroke-dasharray=\"6,4\"" : "") + "/>\n";
      s += "<text x=\"" + num(x1 - 124) + "\" y=\"" + num(ly) + "\">" + escape(label) + "</text>\n";
      ly += 15;
    };
    for (const auto& l : P.lines) legend(l.label, l.color, l.dashed);
    for (const auto& b : P.bars) legend(b.label, b.color, false);
    s += "</g>\n";
  }
  s += "</svg>\n";
  return s;
}

// ---- figure builders ----------------------------------------------------------

struct ControllerTrace {
  Controller controller = Controller::qp;
  std::vector<TraceRow> trace;
};

/// Reference path with the executed QP/PP paths overlaid.
inline std::string figure_paths(std::span<const PathRow> path, std::span<const ControllerTrace> runs,
                                const std::string& title) {
  Panel p;
  p.title = title;
  p.xlabel = "x (m)";
  p.ylabel = "y (m)";
  p.equal_aspect = true;
  Series ref;
  ref.label = "reference";
  ref.dashed = true;
  ref.width = 1.2;
  for (const auto& r : path) {
    ref.x.push_back(r.p.x());
    ref.y.push_back(r.p.y());
  }
  p.lines.push_back(ref);
  for (const auto& run : runs) {
    Series s;
    s.color = color_of(run.controller);
    s.label = label_of(run.controller);
    for (const auto& row : run.trace) {
      s.x.push_back(row.p.x());
      s.y.push_back(row.p.y());
    }
    p.lines.push_back(std::move(s));
  }
  const Panel panels[] = {p};
  return render_svg(panels, 720, 620);
}

struct MarginSet {
  Controller controller = Controller::qp;
  std::vector<double> per_run_mean_delta;
};

/// Per-run mean margin histogram, one panel per controller (scales differ).
inline std::string figure_margin_histogram(std::span<const MarginSet> sets, std::size_t bins) {
  std::vector<Panel> panels;
  for (const auto& set : sets) {
    const auto h = make_histogram(set.per_run_mean_delta, bins);
    Panel p;
    p.title = std::string("per-run mean margin, ") + label_of(set.controller);
    p.xlabel = "mean delta (m/s^2)";
    p.ylabel = "runs";
    BarSet b;
    b.lo = h.lo;
    b.width = h.width;
    b.counts = h.counts;
    b.color = color_of(set.controller);
    b.label = label_of(set.controller);
    p.bars.push_back(b);
    p.vlines.push_back(0.0);
    panels.push_back(std::move(p));
  }
  return render_svg(panels, 720, 300);
}

/// Mean delta(T) on the normalized moving-time grid, one panel per controller.
inline std::string figure_margin_time(const DeltaCurves& curves) {
  std::vector<Panel> panels;
  for (const auto& [c, ys] : curves.curves) {
    Panel p;
    p.title = std::string("mean margin over normalized moving time, ") + label_of(c);
    p.xlabel = "T";
    p.ylabel = "mean delta (m/s^2)";
    Series s;
    s.x = curves.grid;
    s.y = ys;
    s.color = color_of(c);
    s.label = label_of(c);
    p.lines.push_back(std::move(s));
    p.hlines.push_back(0.0);
    panels.push_back(std::move(p));
  }
  return render_svg(panels, 720, 300);
}

/// Moving rows only, re-timed so the excised freeze leaves no gap. Returns the
/// compressed times; freeze_mark receives the compressed freeze instant.
inline std::vector<double> excise_freeze(std::span<const TraceRow> trace, double t_s, std::optional<double>* freeze_mark) {
  std::vector<double> t;
  bool seen_freeze = false;
  for (const auto& row : trace) {
    if (!row.moving) {
      if (!seen_freeze && freeze_mark) *freeze_mark = static_cast<double>(t.size()) * t_s;
      seen_freeze = true;
      continue;
    }
    t.push_back(static_cast<double>(t.size() + 1) * t_s);
  }
  return t;
}

/// Per-axis position and velocity with the freeze removed and its instant
/// marked. The look-ahead target of the first run is drawn as the reference.
inline std::string figure_freeze_removed(std::span<const ControllerTrace> runs, double t_s) {
  const char* names[] = {"x position (m)", "y position (m)", "x velocity (m/s)", "y velocity (m/s)"};
  std::vector<Panel> panels(4);
  std::optional<double> mark;
  for (std::size_t ri = 0; ri < runs.size(); ++ri) {
    const auto& run = runs[ri];
    std::optional<double> m;
    const auto t = excise_freeze(run.trace, t_s, &m);
    if (!mark) mark = m;
    std::vector<const TraceRow*> rows;
    for (const auto& row : run.trace) {
      if (row.moving) rows.push_back(&row);
    }
    for (int k = 0; k < 4; ++k) {
      auto value = [&](const TraceRow& r, bool ref) {
        const Vec2& q = k < 2 ? (ref ? r.p_la : r.p) : (ref ? r.v_la : r.v);
        return q[k % 2];
      };
      if (ri == 0) {
        Series ref;
        ref.label = "reference";
        ref.dashed = true;
        ref.width = 1.2;
        ref.x = t;
        for (const auto* r : rows) ref.y.push_back(value(*r, true));
        panels[k].lines.push_back(std::move(ref));
      }
      Series s;
      s.color = color_of(run.controller);
      s.label = label_of(run.controller);
      s.x = t;
      for (const auto* r : rows) s.y.push_back(value(*r, false));
      panels[k].lines.push_back(std::move(s));
    }
  }
  for (int k = 0; k < 4; ++k) {
    panels[k].ylabel = names[k];
    panels[k].xlabel = "moving time, freeze removed (s)";
    if (mark) panels[k].vlines.push_back(*mark);
  }
  panels[0].title = "per-axis tracking with the freeze interval removed";
  return render_svg(panels, 720, 240);
}

}  // namespace reachtrack::io

#endif  // REACHTRACK_IO_SVG_HPP
