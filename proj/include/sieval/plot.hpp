#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sieval/run.hpp"

namespace sieval {

enum class PlotKind { kBar, kLine };

std::string_view to_string(PlotKind kind);
PlotKind parse_plot_kind(std::string_view tag);

struct PlotPoint {
  std::string label;  // bar category; line charts label ticks with x when empty
  double x = 0.0;     // line charts only
  double y = 0.0;
};

struct PlotSeries {
  std::string name;
  std::vector<PlotPoint> points;
};

struct PlotSpec {
  PlotKind kind = PlotKind::kBar;
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

// Deterministic SVG: fixed canvas, coordinates with two decimals, series in
// the given order. Bars are <rect class="bar">, line markers <circle>.
// Throws InvalidArgument when there is no point to draw.
std::string render_svg(const PlotSpec& spec);
void emit_plot(const PlotSpec& spec, const std::filesystem::path& path);

// Standard figures of a run: per-task metric bars, parse-count bars and,
// when `subject` names a model with several train sizes, efficiency lines.
// Returns the files written under `out_dir`.
std::vector<std::filesystem::path> emit_run_plots(const EvalRun& run, const std::string& subject,
                                                  const std::filesystem::path& out_dir);

}  // namespace sieval
