#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sieval/task.hpp"

namespace sieval {

inline constexpr std::string_view kMetricRougeL = "rougeL_f1";
inline constexpr std::string_view kMetricCosine = "cosine";
inline constexpr std::string_view kMetricParseOk = "json_parse_ok";

// JSON extraction: ROUGE-L F1, cosine, parse validity. KGE and NER: the first two.
std::vector<std::string> applicable_metrics(Task task);

struct MetricComparison {
  std::string metric;
  bool win = false;
};

struct WinRateCell {
  Task task = Task::kJsonExtract;
  std::string subject;
  std::string baseline;
  std::optional<int> train_size;
  int wins = 0;
  int denominator = 0;
  std::vector<MetricComparison> comparisons;

  // wins/denominator rounded half-up to a whole percent.
  int percent() const;
  // "2/3 = 67%"
  std::string display() const;
};

// Counts wins over exactly the task's applicable metrics (in any order).
// Throws InvalidArgument on a missing, extra or repeated metric.
WinRateCell winning_rate(std::span<const MetricComparison> comparisons, Task task);

}  // namespace sieval
