#include "sieval/analysis.hpp"

#include <algorithm>
#include <map>

#include "sieval/errors.hpp"

namespace sieval {

std::vector<GroupKey> select_groups(const EvalRun& run, const std::string& selector, Task task) {
  std::vector<GroupKey> exact;
  std::vector<GroupKey> by_model;
  for (const auto& a : run.aggregates) {
    if (a.key.task != task) continue;
    if (a.key.label() == selector) exact.push_back(a.key);
    if (a.key.model == selector) by_model.push_back(a.key);
  }
  return exact.empty() ? by_model : exact;
}

namespace {

// Per-example scores of one group, keyed by example id.
std::map<std::string, const ScoredRecord*> group_records(const EvalRun& run, const GroupKey& key) {
  std::map<std::string, const ScoredRecord*> out;
  for (const auto& r : run.records) {
    if (r.task == key.task && r.model == key.model && r.train_size == key.train_size) out[r.example_id] = &r;
  }
  return out;
}

std::optional<GroupKey> single_baseline(const EvalRun& run, const std::string& baseline, Task task) {
  const auto groups = select_groups(run, baseline, task);
  if (groups.empty()) return std::nullopt;
  if (groups.size() > 1) {
    throw InvalidArgument("baseline '" + baseline + "' matches " + std::to_string(groups.size()) +
                          " groups for task " + std::string(to_string(task)) +
                          "; name one group label such as '" + groups.front().label() + "'");
  }
  return groups.front();
}

void check_alignment(const std::map<std::string, const ScoredRecord*>& subject,
                     const std::map<std::string, const ScoredRecord*>& baseline, const GroupKey& s,
                     const GroupKey& b) {
  std::vector<std::string> only_subject;
  std::vector<std::string> only_baseline;
  for (const auto& [id, r] : subject) {
    if (!baseline.contains(id)) only_subject.push_back(id);
  }
  for (const auto& [id, r] : baseline) {
    if (!subject.contains(id)) only_baseline.push_back(id);
  }
  if (only_subject.empty() && only_baseline.empty()) return;
  const auto list = [](const std::vector<std::string>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size() && i < 10; ++i) out += (i ? ", " : "") + ids[i];
    if (ids.size() > 10) out += ", ... (" + std::to_string(ids.size()) + " total)";
    return out.empty() ? std::string("none") : out;
  };
  throw ValidationError("example ids not aligned for task " + std::string(to_string(s.task)) + " between " +
                        s.label() + " and " + b.label() + ": missing from " + b.label() + ": " +
                        list(only_subject) + "; missing from " + s.label() + ": " + list(only_baseline));
}

}  // namespace

std::vector<SignificanceCell> significance_matrix(const EvalRun& run, const std::string& subject,
                                                  std::span<const std::string> baselines,
                                                  std::span<const TestMethod> methods) {
  for (TestMethod m : methods) {
    if (m == TestMethod::kTwoPropZ) throw InvalidArgument("two-prop-z is not a paired method");
  }
  PairedOptions paired;
  paired.alpha = run.config.alpha;
  paired.resamples = run.config.bootstrap_resamples;
  paired.seed = run.config.seed;
  paired.jobs = run.config.jobs;
  TwoPropOptions z_opts{run.config.alpha, run.config.continuity_correction};

  std::vector<SignificanceCell> cells;
  for (Task task : kAllTasks) {
    const auto subjects = select_groups(run, subject, task);
    if (subjects.empty()) continue;
    for (const auto& baseline : baselines) {
      const auto base_key = single_baseline(run, baseline, task);
      if (!base_key) continue;
      const auto base_records = group_records(run, *base_key);
      for (const GroupKey& s : subjects) {
        if (s == *base_key) continue;
        const auto subj_records = group_records(run, s);
        check_alignment(subj_records, base_records, s, *base_key);

        std::vector<double> rl_s, rl_b, cos_s, cos_b;
        for (const auto& [id, r] : subj_records) {
          const ScoredRecord* b = base_records.at(id);
          rl_s.push_back(r->metrics.rougeL.f1);
          rl_b.push_back(b->metrics.rougeL.f1);
          cos_s.push_back(r->metrics.cosine);
          cos_b.push_back(b->metrics.cosine);
        }
        const auto cell = [&](std::string metric, SignificanceResult result) {
          cells.push_back({task, s.label(), base_key->label(), s.train_size, std::move(metric), result});
        };
        for (TestMethod m : methods) {
          cell(std::string(kMetricRougeL), paired_test(rl_s, rl_b, m, paired));
          cell(std::string(kMetricCosine), paired_test(cos_s, cos_b, m, paired));
        }
        if (task == Task::kJsonExtract) {
          const Aggregate* as = run.find_aggregate(s);
          const Aggregate* ab = run.find_aggregate(*base_key);
          cell(std::string(kMetricParseOk),
               two_prop_z(static_cast<std::int64_t>(as->parse_count), static_cast<std::int64_t>(as->n),
                          static_cast<std::int64_t>(ab->parse_count), static_cast<std::int64_t>(ab->n), z_opts));
        }
      }
    }
  }
  return cells;
}

std::vector<WinRateCell> winrate_matrix(const EvalRun& run, const std::string& subject,
                                        std::span<const std::string> baselines) {
  std::vector<WinRateCell> cells;
  for (Task task : kAllTasks) {
    const auto subjects = select_groups(run, subject, task);
    if (subjects.empty()) continue;
    for (const auto& baseline : baselines) {
      const auto base_key = single_baseline(run, baseline, task);
      if (!base_key) {
        throw ValidationError("no aggregate for baseline '" + baseline + "' on task " +
                              std::string(to_string(task)));
      }
      const Aggregate& b = *run.find_aggregate(*base_key);
      for (const GroupKey& s : subjects) {
        if (s == *base_key) continue;
        const Aggregate& a = *run.find_aggregate(s);
        std::vector<MetricComparison> comparisons = {
            {std::string(kMetricRougeL), a.rougeL_f1 > b.rougeL_f1},
            {std::string(kMetricCosine), a.cosine > b.cosine},
        };
        if (task == Task::kJsonExtract) {
          comparisons.push_back({std::string(kMetricParseOk), a.parse_rate() > b.parse_rate()});
        }
        WinRateCell cell = winning_rate(comparisons, task);
        cell.subject = s.label();
        cell.baseline = base_key->label();
        cell.train_size = s.train_size;
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

std::vector<std::pair<Task, EfficiencyCurve>> efficiency_curves(const EvalRun& run, const std::string& subject_model) {
  std::vector<std::pair<Task, EfficiencyCurve>> curves;
  for (Task task : kAllTasks) {
    std::vector<const Aggregate*> sized;
    for (const auto& a : run.aggregates) {
      if (a.key.task == task && a.key.model == subject_model && a.key.train_size) sized.push_back(&a);
    }
    if (sized.size() < 2) continue;
    const auto points = [&](auto value) {
      std::vector<CurvePoint> pts;
      for (const Aggregate* a : sized) pts.push_back({*a->key.train_size, value(*a)});
      return pts;
    };
    curves.emplace_back(task, efficiency_curve(std::string(kMetricRougeL),
                                               points([](const Aggregate& a) { return a.rougeL_f1; }),
                                               run.config.unit_epsilon));
    curves.emplace_back(task, efficiency_curve(std::string(kMetricCosine),
                                               points([](const Aggregate& a) { return a.cosine; }),
                                               run.config.unit_epsilon));
    if (task == Task::kJsonExtract) {
      curves.emplace_back(task, efficiency_curve("parse_count",
                                                 points([](const Aggregate& a) { return static_cast<double>(a.parse_count); }),
                                                 run.config.count_epsilon));
    }
  }
  return curves;
}

}  // namespace sieval
