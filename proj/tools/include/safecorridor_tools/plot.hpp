#pragma once

#include <string>
#include <vector>

#include "safecorridor_tools/bench.hpp"

namespace safecorridor::tools {

enum class PlotKind { kBars, kCurve };

PlotKind parse_plot_kind(const std::string& name);

/// Metric value of one row: collision_checks, iterations, extensions,
/// colliding_fraction or wall_time_ms.
double metric_value(const TrialRow& row, const std::string& metric);

/// One bar per (scenario, train size, variant) group: median with IQR whiskers.
std::string render_bars(const std::vector<TrialRow>& rows, const std::string& metric);

/// Mean metric against training size, one polyline per variant that has
/// model-backed rows. The x axis is logarithmic.
std::string render_curve(const std::vector<TrialRow>& rows, const std::string& metric);

}  // namespace safecorridor::tools
