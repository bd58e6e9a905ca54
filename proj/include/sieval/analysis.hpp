#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sieval/efficiency.hpp"
#include "sieval/run.hpp"
#include "sieval/significance.hpp"
#include "sieval/winrate.hpp"

namespace sieval {

// Groups of `task` selected by `selector`: an exact group label ("ETLCH-100")
// or a model name ("ETLCH", every train size). Sorted by GroupKey.
std::vector<GroupKey> select_groups(const EvalRun& run, const std::string& selector, Task task);

struct SignificanceCell {
  Task task = Task::kJsonExtract;
  std::string subject;   // group label
  std::string baseline;  // group label
  std::optional<int> train_size;  // subject's
  std::string metric;    // rougeL_f1 | cosine | json_parse_ok
  SignificanceResult result;
};

// For every task where both sides have groups: paired tests (each method in
// `methods`) on per-example ROUGE-L F1 and cosine, and for json-extract a
// two-proportion z-test on parse counts. Throws ValidationError (alignment)
// naming missing example ids when a subject/baseline pair differs in its
// example sets, and InvalidArgument when a baseline label matches several
// groups of one task.
std::vector<SignificanceCell> significance_matrix(const EvalRun& run, const std::string& subject,
                                                  std::span<const std::string> baselines,
                                                  std::span<const TestMethod> methods);

// One cell per (task, baseline, subject group). A metric is a win only when
// the subject's aggregate strictly exceeds the baseline's. Throws
// ValidationError when a requested baseline has no aggregate for a task the
// subject covers.
std::vector<WinRateCell> winrate_matrix(const EvalRun& run, const std::string& subject,
                                        std::span<const std::string> baselines);

// Per task, the subject model's aggregates across its train sizes:
// ROUGE-L F1 and cosine (unit epsilon) and, for json-extract, parse counts
// (count epsilon). Tasks with fewer than two sizes are skipped.
std::vector<std::pair<Task, EfficiencyCurve>> efficiency_curves(const EvalRun& run, const std::string& subject_model);

}  // namespace sieval
