#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sieval/run.hpp"

namespace sieval {

struct ReportOptions {
  std::string subject;                 // group label or model name; empty skips comparisons
  std::vector<std::string> baselines;  // group labels or model names
};

inline constexpr const char* kReportFiles[] = {"metrics.csv", "parse_counts.csv", "significance.json",
                                               "winrate.csv", "efficiency.csv"};

// Model whose groups `subject` names: the model itself, or the model of the
// group carrying that label. Empty when nothing matches.
std::string subject_model(const EvalRun& run, const std::string& subject);

// Writes the five report files into `out_dir` (created if needed). Every CSV
// row and the JSON document carry the run id and config digest. Output
// depends only on the run and options.
std::vector<std::filesystem::path> build_report(const EvalRun& run, const ReportOptions& options,
                                                const std::filesystem::path& out_dir);

std::string metrics_table(const EvalRun& run);
std::string parse_count_table(const EvalRun& run);
std::string significance_document(const EvalRun& run, const ReportOptions& options);
std::string winrate_table(const EvalRun& run, const ReportOptions& options);
std::string efficiency_table(const EvalRun& run, const ReportOptions& options);

}  // namespace sieval
