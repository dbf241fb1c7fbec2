#include "safecorridor_tools/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "safecorridor/error.hpp"
#include "safecorridor_tools/svg.hpp"

namespace safecorridor::tools {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

PlotKind parse_plot_kind(const std::string& name) {
  if (name == "bars") return PlotKind::kBars;
  if (name == "curve") return PlotKind::kCurve;
  throw Error(ErrorCode::kInvalidArgument, "unknown plot kind '" + name + "'");
}

double metric_value(const TrialRow& row, const std::string& metric) {
  if (metric == "collision_checks") return static_cast<double>(row.collision_checks);
  if (metric == "iterations") return static_cast<double>(row.iterations);
  if (metric == "extensions") return static_cast<double>(row.extensions);
  if (metric == "colliding_fraction") return row.colliding_fraction();
  if (metric == "wall_time_ms") return row.wall_time_ms;
  throw Error(ErrorCode::kInvalidArgument, "unknown metric '" + metric + "'");
}

std::string render_bars(const std::vector<TrialRow>& rows, const std::string& metric) {
  if (rows.empty()) throw Error(ErrorCode::kInvalidArgument, "nothing to plot");
  const std::vector<GroupSummary> groups = summarize(rows);
  std::set<std::string> scenarios;
  std::set<std::size_t> sizes;
  for (const auto& g : groups) {
    scenarios.insert(g.scenario);
    sizes.insert(g.train_samples);
  }

  struct Bar {
    std::string label;
    double median, q1, q3;
  };
  std::vector<Bar> bars;
  double top = 0.0;
  for (const auto& g : groups) {
    std::vector<double> values;
    for (const auto& r : rows) {
      if (r.scenario == g.scenario && r.train_samples == g.train_samples && r.variant == g.variant) {
        values.push_back(metric_value(r, metric));
      }
    }
    std::string label = g.variant;
    if (sizes.size() > 1 && g.train_samples > 0) label += " n=" + std::to_string(g.train_samples);
    if (scenarios.size() > 1) label = g.scenario + "/" + label;
    bars.push_back({label, quantile(values, 0.5), quantile(values, 0.25), quantile(values, 0.75)});
    top = std::max(top, bars.back().q3);
  }
  if (!(top > 0.0)) top = 1.0;

  const double n = static_cast<double>(bars.size());
  SvgCanvas svg(std::max(360.0, 110.0 * n + 80.0), 420.0, {0.0, 0.0}, {n, top * 1.1}, 50.0);
  svg.frame();
  svg.raw_text(svg.map({n / 2, top * 1.1}).x(), 30.0, "median " + metric + " (IQR whiskers)", 14.0);
  for (int t = 0; t <= 4; ++t) {
    const double y = top * 1.1 * t / 4.0;
    svg.text({0.0, y}, fmt(y), 10.0, "end");
  }
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double x = static_cast<double>(i);
    const Bar& b = bars[i];
    svg.rect({x + 0.15, 0.0}, {x + 0.85, b.median}, kPalette[i % std::size(kPalette)]);
    svg.line({x + 0.5, b.q1}, {x + 0.5, b.q3}, "#000", 1.5);
    svg.line({x + 0.4, b.q1}, {x + 0.6, b.q1}, "#000", 1.5);
    svg.line({x + 0.4, b.q3}, {x + 0.6, b.q3}, "#000", 1.5);
    const Eigen::Vector2d base = svg.map({x + 0.5, 0.0});
    svg.raw_text(base.x(), base.y() + 18.0, b.label, 11.0);
  }
  return svg.str();
}

std::string render_curve(const std::vector<TrialRow>& rows, const std::string& metric) {
  std::map<std::string, std::map<std::size_t, std::pair<double, std::size_t>>> series;
  std::vector<std::string> order;
  for (const auto& r : rows) {
    if (r.train_samples == 0) continue;
    if (!series.count(r.variant)) order.push_back(r.variant);
    auto& cell = series[r.variant][r.train_samples];
    cell.first += metric_value(r, metric);
    cell.second += 1;
  }
  if (series.empty()) throw Error(ErrorCode::kInvalidArgument, "no model-backed rows to plot");

  double x_lo = INFINITY, x_hi = -INFINITY, y_hi = 0.0;
  for (const auto& [variant, points] : series) {
    for (const auto& [size, acc] : points) {
      x_lo = std::min(x_lo, std::log10(static_cast<double>(size)));
      x_hi = std::max(x_hi, std::log10(static_cast<double>(size)));
      y_hi = std::max(y_hi, acc.first / static_cast<double>(acc.second));
    }
  }
  if (!(x_hi > x_lo)) {
    x_lo -= 0.5;
    x_hi += 0.5;
  }
  if (!(y_hi > 0.0)) y_hi = 1.0;

  SvgCanvas svg(560.0, 420.0, {x_lo, 0.0}, {x_hi, y_hi * 1.1}, 60.0);
  svg.frame();
  svg.raw_text(280.0, 30.0, "mean " + metric + " vs training samples", 14.0);
  for (int t = 0; t <= 4; ++t) {
    const double y = y_hi * 1.1 * t / 4.0;
    svg.text({x_lo, y}, fmt(y), 10.0, "end");
  }
  std::size_t color = 0;
  for (const auto& variant : order) {
    std::vector<Eigen::Vector2d> pts;
    for (const auto& [size, acc] : series.at(variant)) {
      const Eigen::Vector2d p(std::log10(static_cast<double>(size)), acc.first / static_cast<double>(acc.second));
      pts.push_back(p);
      const Eigen::Vector2d px = svg.map({p.x(), 0.0});
      svg.raw_text(px.x(), px.y() + 18.0, std::to_string(size), 10.0);
    }
    const char* c = kPalette[color++ % std::size(kPalette)];
    svg.polyline(pts, c, 2.0);
    for (const auto& p : pts) svg.dot(p, 3.0, c);
    svg.raw_text(500.0, 60.0 + 16.0 * static_cast<double>(color), variant, 11.0, "end");
  }
  return svg.str();
}

}  // namespace safecorridor::tools
