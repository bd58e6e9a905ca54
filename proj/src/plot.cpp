#include "sieval/plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "sieval/analysis.hpp"
#include "sieval/digest.hpp"
#include "sieval/errors.hpp"
#include "sieval/report.hpp"

namespace sieval {

namespace fs = std::filesystem;

std::string_view to_string(PlotKind kind) { return kind == PlotKind::kBar ? "bar" : "line"; }

PlotKind parse_plot_kind(std::string_view tag) {
  if (tag == "bar") return PlotKind::kBar;
  if (tag == "line") return PlotKind::kLine;
  throw InvalidArgument("unknown plot kind '" + std::string(tag) + "' (expected bar or line)");
}

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 64.0;
constexpr double kRight = 16.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 56.0;
constexpr int kTicks = 5;
constexpr const char* kPalette[] = {"#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee", "#aa3377", "#bbbbbb"};

std::string fixed2(double v) {
  if (std::abs(v) < 0.005) v = 0.0;  // no "-0.00"
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

std::string tick_label(double v) {
  if (std::abs(v) < 1e-12) v = 0.0;
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 4);
  return std::string(buf, res.ptr);
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;
  double map(double v, double a, double b) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

Range y_range(const PlotSpec& spec) {
  double lo = 0.0;
  double hi = 0.0;
  for (const auto& s : spec.series) {
    for (const auto& p : s.points) {
      lo = std::min(lo, p.y);
      hi = std::max(hi, p.y);
    }
  }
  if (hi - lo <= 0.0) hi = lo + 1.0;
  return {lo, hi};
}

void axes(std::string& svg, const PlotSpec& spec, const Range& y) {
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  svg += "<text class=\"title\" x=\"" + fixed2(kWidth / 2) + "\" y=\"24.00\" text-anchor=\"middle\">" +
         escape(spec.title) + "</text>\n";
  svg += "<line class=\"axis\" x1=\"" + fixed2(x0) + "\" y1=\"" + fixed2(y0) + "\" x2=\"" + fixed2(x1) + "\" y2=\"" +
         fixed2(y0) + "\" stroke=\"#000\"/>\n";
  svg += "<line class=\"axis\" x1=\"" + fixed2(x0) + "\" y1=\"" + fixed2(y0) + "\" x2=\"" + fixed2(x0) + "\" y2=\"" +
         fixed2(y1) + "\" stroke=\"#000\"/>\n";
  for (int i = 0; i <= kTicks; ++i) {
    const double v = y.lo + (y.hi - y.lo) * i / kTicks;
    const double py = y.map(v, y0, y1);
    svg += "<text class=\"ytick\" x=\"" + fixed2(x0 - 6) + "\" y=\"" + fixed2(py + 4) + "\" text-anchor=\"end\">" +
           tick_label(v) + "</text>\n";
  }
  svg += "<text class=\"xlabel\" x=\"" + fixed2((x0 + x1) / 2) + "\" y=\"" + fixed2(kHeight - 12) +
         "\" text-anchor=\"middle\">" + escape(spec.x_label) + "</text>\n";
  svg += "<text class=\"ylabel\" x=\"16.00\" y=\"" + fixed2((y0 + y1) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16.00 " +
         fixed2((y0 + y1) / 2) + ")\">" + escape(spec.y_label) + "</text>\n";
}

void legend(std::string& svg, const PlotSpec& spec) {
  if (spec.series.size() < 2) return;
  double x = kLeft + 8;
  for (std::size_t i = 0; i < spec.series.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    svg += "<rect class=\"legend\" x=\"" + fixed2(x) + "\" y=\"" + fixed2(kTop - 4) +
           "\" width=\"10.00\" height=\"10.00\" fill=\"" + color + "\"/>\n";
    svg += "<text class=\"legend\" x=\"" + fixed2(x + 14) + "\" y=\"" + fixed2(kTop + 5) + "\">" +
           escape(spec.series[i].name) + "</text>\n";
    x += 24 + 7.0 * static_cast<double>(spec.series[i].name.size());
  }
}

void bars(std::string& svg, const PlotSpec& spec, const Range& y) {
  std::vector<std::string> categories;
  for (const auto& s : spec.series) {
    for (const auto& p : s.points) {
      if (std::find(categories.begin(), categories.end(), p.label) == categories.end()) categories.push_back(p.label);
    }
  }
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  const double slot = (x1 - x0) / static_cast<double>(categories.size());
  const double bar = slot * 0.8 / static_cast<double>(spec.series.size());
  const double base = y.map(0.0, y0, y1);
  for (std::size_t c = 0; c < categories.size(); ++c) {
    svg += "<text class=\"xtick\" x=\"" + fixed2(x0 + slot * (c + 0.5)) + "\" y=\"" + fixed2(y0 + 16) +
           "\" text-anchor=\"middle\">" + escape(categories[c]) + "</text>\n";
  }
  for (std::size_t s = 0; s < spec.series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    for (const auto& p : spec.series[s].points) {
      const auto c = static_cast<std::size_t>(std::find(categories.begin(), categories.end(), p.label) - categories.begin());
      const double left = x0 + slot * c + slot * 0.1 + bar * s;
      const double top = y.map(p.y, y0, y1);
      svg += "<rect class=\"bar\" x=\"" + fixed2(left) + "\" y=\"" + fixed2(std::min(top, base)) + "\" width=\"" +
             fixed2(bar) + "\" height=\"" + fixed2(std::abs(base - top)) + "\" fill=\"" + color + "\"><title>" +
             escape(spec.series[s].name) + " " + escape(p.label) + ": " + tick_label(p.y) + "</title></rect>\n";
    }
  }
}

void lines(std::string& svg, const PlotSpec& spec, const Range& y) {
  double lo = INFINITY, hi = -INFINITY;
  std::map<double, std::string> ticks;
  for (const auto& s : spec.series) {
    for (const auto& p : s.points) {
      lo = std::min(lo, p.x);
      hi = std::max(hi, p.x);
      ticks.emplace(p.x, p.label.empty() ? tick_label(p.x) : p.label);
    }
  }
  const double pad = 24.0;
  const double x0 = kLeft + pad, x1 = kWidth - kRight - pad, y0 = kHeight - kBottom, y1 = kTop;
  const auto px = [&](double v) { return hi > lo ? x0 + (v - lo) / (hi - lo) * (x1 - x0) : (x0 + x1) / 2; };
  for (const auto& [x, label] : ticks) {
    svg += "<text class=\"xtick\" x=\"" + fixed2(px(x)) + "\" y=\"" + fixed2(y0 + 16) + "\" text-anchor=\"middle\">" +
           escape(label) + "</text>\n";
  }
  for (std::size_t s = 0; s < spec.series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    auto points = spec.series[s].points;
    std::stable_sort(points.begin(), points.end(), [](const PlotPoint& a, const PlotPoint& b) { return a.x < b.x; });
    if (points.size() > 1) {
      std::string path;
      for (const auto& p : points) path += (path.empty() ? "" : " ") + fixed2(px(p.x)) + "," + fixed2(y.map(p.y, y0, y1));
      svg += "<polyline class=\"line\" points=\"" + path + "\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"2.00\"/>\n";
    }
    for (const auto& p : points) {
      svg += "<circle class=\"marker\" cx=\"" + fixed2(px(p.x)) + "\" cy=\"" + fixed2(y.map(p.y, y0, y1)) +
             "\" r=\"4.00\" fill=\"" + color + "\"><title>" + escape(spec.series[s].name) + " " + tick_label(p.x) +
             ": " + tick_label(p.y) + "</title></circle>\n";
    }
  }
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  bool any = false;
  for (const auto& s : spec.series) {
    for (const auto& p : s.points) {
      if (!std::isfinite(p.y) || !std::isfinite(p.x)) throw InvalidArgument("plot values must be finite");
      any = true;
    }
  }
  if (!any) throw InvalidArgument("plot '" + spec.title + "' has no points");
  const Range y = y_range(spec);
  std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed2(kWidth) + "\" height=\"" + fixed2(kHeight) +
         "\" viewBox=\"0 0 " + fixed2(kWidth) + " " + fixed2(kHeight) +
         "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "<rect x=\"0.00\" y=\"0.00\" width=\"" + fixed2(kWidth) + "\" height=\"" + fixed2(kHeight) + "\" fill=\"#fff\"/>\n";
  axes(svg, spec, y);
  if (spec.kind == PlotKind::kBar) {
    bars(svg, spec, y);
  } else {
    lines(svg, spec, y);
  }
  legend(svg, spec);
  svg += "</svg>\n";
  return svg;
}

void emit_plot(const PlotSpec& spec, const fs::path& path) { write_file(path, render_svg(spec)); }

std::vector<fs::path> emit_run_plots(const EvalRun& run, const std::string& subject, const fs::path& out_dir) {
  std::vector<std::pair<std::string, PlotSpec>> plots;
  for (Task task : kAllTasks) {
    PlotSpec spec{PlotKind::kBar, std::string(to_string(task)) + " metrics", "model", "score", {{"rougeL_f1", {}}, {"cosine", {}}}};
    for (const auto& a : run.aggregates) {
      if (a.key.task != task) continue;
      spec.series[0].points.push_back({a.key.label(), 0.0, a.rougeL_f1});
      spec.series[1].points.push_back({a.key.label(), 0.0, a.cosine});
    }
    if (!spec.series[0].points.empty()) plots.emplace_back(std::string(to_string(task)) + "_metrics.svg", std::move(spec));
  }
  PlotSpec parse{PlotKind::kBar, "valid JSON outputs", "model", "parse count", {{"parse_count", {}}}};
  for (const auto& a : run.aggregates) {
    if (a.key.task == Task::kJsonExtract) {
      parse.series[0].points.push_back({a.key.label(), 0.0, static_cast<double>(a.parse_count)});
    }
  }
  if (!parse.series[0].points.empty()) plots.emplace_back("parse_counts.svg", std::move(parse));

  const std::string model = subject.empty() ? std::string() : subject_model(run, subject);
  if (!model.empty()) {
    for (const auto& [task, curve] : efficiency_curves(run, model)) {
      PlotSpec spec{PlotKind::kLine, model + " " + std::string(to_string(task)) + " " + curve.metric, "training samples",
                    curve.metric, {{curve.metric, {}}}};
      for (const auto& p : curve.points) {
        spec.series[0].points.push_back({std::to_string(p.train_size), static_cast<double>(p.train_size), p.value});
      }
      plots.emplace_back("efficiency_" + std::string(to_string(task)) + "_" + curve.metric + ".svg", std::move(spec));
    }
  }

  std::vector<std::pair<fs::path, std::string>> rendered;
  for (const auto& [name, spec] : plots) rendered.emplace_back(out_dir / name, render_svg(spec));
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<fs::path> written;
  for (const auto& [path, svg] : rendered) {
    write_file(path, svg);
    written.push_back(path);
  }
  return written;
}

}  // namespace sieval
