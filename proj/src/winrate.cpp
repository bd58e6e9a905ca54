#include "sieval/winrate.hpp"

#include <algorithm>
#include <set>

#include "sieval/errors.hpp"

namespace sieval {

std::vector<std::string> applicable_metrics(Task task) {
  if (task == Task::kJsonExtract) {
    return {std::string(kMetricRougeL), std::string(kMetricCosine), std::string(kMetricParseOk)};
  }
  return {std::string(kMetricRougeL), std::string(kMetricCosine)};
}

int WinRateCell::percent() const {
  if (denominator <= 0) return 0;
  return (200 * wins + denominator) / (2 * denominator);
}

std::string WinRateCell::display() const {
  return std::to_string(wins) + "/" + std::to_string(denominator) + " = " +
         std::to_string(percent()) + "%";
}

WinRateCell winning_rate(std::span<const MetricComparison> comparisons, Task task) {
  const std::vector<std::string> expected = applicable_metrics(task);
  std::set<std::string> seen;
  for (const auto& c : comparisons) {
    if (std::find(expected.begin(), expected.end(), c.metric) == expected.end()) {
      throw InvalidArgument("winning_rate: metric '" + c.metric + "' does not apply to task " +
                            std::string(to_string(task)));
    }
    if (!seen.insert(c.metric).second) {
      throw InvalidArgument("winning_rate: metric '" + c.metric + "' given twice");
    }
  }
  if (seen.size() != expected.size()) {
    for (const auto& m : expected) {
      if (!seen.contains(m)) {
        throw InvalidArgument("winning_rate: missing metric '" + m + "' for task " +
                              std::string(to_string(task)));
      }
    }
  }
  WinRateCell cell;
  cell.task = task;
  cell.denominator = static_cast<int>(expected.size());
  cell.wins = static_cast<int>(std::count_if(comparisons.begin(), comparisons.end(),
                                             [](const MetricComparison& c) { return c.win; }));
  // Keep comparisons in the canonical metric order.
  for (const auto& m : expected) {
    auto it = std::find_if(comparisons.begin(), comparisons.end(),
                           [&](const MetricComparison& c) { return c.metric == m; });
    cell.comparisons.push_back(*it);
  }
  return cell;
}

}  // namespace sieval
