#include "sieval/report.hpp"

#include <json.hpp>

#include "sieval/analysis.hpp"
#include "sieval/csv.hpp"
#include "sieval/digest.hpp"
#include "sieval/errors.hpp"

namespace sieval {

namespace fs = std::filesystem;

namespace {

std::string size_field(const std::optional<int>& size) { return size ? std::to_string(*size) : std::string(); }
std::string size_field(const std::optional<std::int64_t>& size) { return size ? std::to_string(*size) : std::string(); }

csv::Row with_ids(const EvalRun& run, csv::Row fields) {
  fields.insert(fields.begin(), {run.run_id, run.config_digest});
  return fields;
}

csv::Row header(csv::Row fields) {
  fields.insert(fields.begin(), {"run_id", "config_digest"});
  return fields;
}

}  // namespace

std::string subject_model(const EvalRun& run, const std::string& subject) {
  for (const auto& a : run.aggregates) {
    if (a.key.model == subject) return a.key.model;
  }
  for (const auto& a : run.aggregates) {
    if (a.key.label() == subject) return a.key.model;
  }
  return {};
}

std::string metrics_table(const EvalRun& run) {
  std::vector<csv::Row> rows;
  for (const auto& a : run.aggregates) {
    rows.push_back(with_ids(run, {std::string(to_string(a.key.task)), a.key.model, size_field(a.key.train_size),
                                  std::to_string(a.n), csv::format_double(a.rouge1_f1),
                                  csv::format_double(a.rouge2_f1), csv::format_double(a.rougeL_f1),
                                  csv::format_double(a.cosine)}));
  }
  return csv::format_table(header({"task", "model", "train_size", "n", "rouge1_f1", "rouge2_f1", "rougeL_f1", "cosine"}),
                           rows);
}

std::string parse_count_table(const EvalRun& run) {
  std::vector<csv::Row> rows;
  for (const auto& a : run.aggregates) {
    if (a.key.task != Task::kJsonExtract) continue;
    csv::Row row{a.key.model, size_field(a.key.train_size), std::to_string(a.n), std::to_string(a.parse_count),
                 csv::format_double(a.parse_rate())};
    for (std::size_t count : a.level_counts) row.push_back(std::to_string(count));
    rows.push_back(with_ids(run, std::move(row)));
  }
  return csv::format_table(header({"model", "train_size", "n", "parse_count", "parse_rate", "level0", "level1",
                                   "level2", "level3"}),
                           rows);
}

std::string significance_document(const EvalRun& run, const ReportOptions& options) {
  nlohmann::ordered_json doc;
  doc["run_id"] = run.run_id;
  doc["config_digest"] = run.config_digest;
  doc["subject"] = options.subject;
  doc["baselines"] = options.baselines;
  doc["alpha"] = run.config.alpha;
  auto cells = nlohmann::ordered_json::array();
  if (!options.subject.empty()) {
    for (const auto& c : significance_matrix(run, options.subject, options.baselines, run.config.methods)) {
      nlohmann::ordered_json j;
      j["task"] = to_string(c.task);
      j["subject"] = c.subject;
      j["baseline"] = c.baseline;
      j["train_size"] = c.train_size ? nlohmann::ordered_json(*c.train_size) : nlohmann::ordered_json();
      j["metric"] = c.metric;
      j["method"] = to_string(c.result.method);
      j["statistic"] = c.result.statistic;
      j["p_two_tailed"] = c.result.p_two_tailed;
      j["log10_p"] = c.result.log10_p;
      j["n1"] = c.result.n1;
      j["n2"] = c.result.n2;
      j["alpha"] = c.result.alpha;
      j["significant"] = c.result.significant;
      j["degenerate"] = c.result.degenerate;
      cells.push_back(std::move(j));
    }
  }
  doc["cells"] = std::move(cells);
  return doc.dump(2) + "\n";
}

std::string winrate_table(const EvalRun& run, const ReportOptions& options) {
  std::vector<csv::Row> rows;
  if (!options.subject.empty()) {
    for (const auto& c : winrate_matrix(run, options.subject, options.baselines)) {
      std::string detail;
      for (const auto& m : c.comparisons) detail += (detail.empty() ? "" : ";") + m.metric + (m.win ? ":win" : ":loss");
      rows.push_back(with_ids(run, {std::string(to_string(c.task)), c.subject, c.baseline, size_field(c.train_size),
                                    std::to_string(c.wins), std::to_string(c.denominator), std::to_string(c.percent()),
                                    c.display(), detail}));
    }
  }
  return csv::format_table(
      header({"task", "subject", "baseline", "train_size", "wins", "denominator", "percent", "display", "metrics"}),
      rows);
}

std::string efficiency_table(const EvalRun& run, const ReportOptions& options) {
  std::vector<csv::Row> rows;
  const std::string model = options.subject.empty() ? std::string() : subject_model(run, options.subject);
  if (!model.empty()) {
    for (const auto& [task, curve] : efficiency_curves(run, model)) {
      for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const auto& p = curve.points[i];
        rows.push_back(with_ids(run, {std::string(to_string(task)), model, curve.metric, std::to_string(p.train_size),
                                      csv::format_double(p.value),
                                      i == 0 ? std::string() : csv::format_double(curve.marginal_gains[i - 1].delta),
                                      size_field(curve.plateau_size)}));
      }
    }
  }
  return csv::format_table(header({"task", "model", "metric", "train_size", "value", "gain", "plateau_size"}), rows);
}

std::vector<fs::path> build_report(const EvalRun& run, const ReportOptions& options, const fs::path& out_dir) {
  // Compute everything before touching the directory so a failed analysis
  // leaves no partial report behind.
  const std::string contents[] = {metrics_table(run), parse_count_table(run), significance_document(run, options),
                                  winrate_table(run, options), efficiency_table(run, options)};
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<fs::path> written;
  for (std::size_t i = 0; i < std::size(kReportFiles); ++i) {
    written.push_back(out_dir / kReportFiles[i]);
    write_file(written.back(), contents[i]);
  }
  return written;
}

}  // namespace sieval
