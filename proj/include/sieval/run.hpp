#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "sieval/efficiency.hpp"
#include "sieval/metrics.hpp"
#include "sieval/predictions.hpp"
#include "sieval/significance.hpp"
#include "sieval/tokenize.hpp"

namespace sieval {

struct ScoreConfig {
  TokenizerMode tokenizer = TokenizerMode::kCjkChar;
  bool extract_json = false;  // parse only the longest {...} span of JSON outputs
  std::vector<TestMethod> methods{TestMethod::kPairedT};
  double alpha = kDefaultAlpha;
  double unit_epsilon = kUnitMetricEpsilon;
  double count_epsilon = kCountEpsilon;
  std::size_t bootstrap_resamples = 10000;
  std::uint64_t seed = 20240917;
  bool continuity_correction = false;
  std::size_t jobs = 1;  // not part of the snapshot: results do not depend on it
  std::optional<std::filesystem::path> embeddings;
};

// Everything that can change a score, as stored in run.json.
nlohmann::ordered_json config_snapshot(const ScoreConfig& config, const std::string& embeddings_digest);
ScoreConfig config_from_snapshot(const nlohmann::json& snapshot);

struct MetricVector {
  OverlapScore rouge1;
  OverlapScore rouge2;
  OverlapScore rougeL;
  double cosine = 0.0;
  std::optional<int> parse_level;  // json-extract records only: -1..3

  bool parsed() const { return parse_level && *parse_level >= 0; }
};

struct ScoredRecord {
  std::string example_id;
  Task task = Task::kJsonExtract;
  std::string model;
  std::optional<int> train_size;
  MetricVector metrics;
};

struct GroupKey {
  Task task = Task::kJsonExtract;
  std::string model;
  std::optional<int> train_size;

  auto operator<=>(const GroupKey&) const = default;
  bool operator==(const GroupKey&) const = default;
  std::string label() const { return group_label(model, train_size); }
};

struct Aggregate {
  GroupKey key;
  std::size_t n = 0;
  double rouge1_f1 = 0.0;
  double rouge2_f1 = 0.0;
  double rougeL_f1 = 0.0;
  double cosine = 0.0;
  std::size_t parse_count = 0;                // level >= 0 (json-extract only)
  std::array<std::size_t, 4> level_counts{};  // records reaching level >= k, k = 0..3

  double parse_rate() const { return n == 0 ? 0.0 : static_cast<double>(parse_count) / static_cast<double>(n); }
  bool operator==(const Aggregate&) const = default;
};

struct EvalRun {
  std::string run_id;
  ScoreConfig config;
  std::string config_digest;
  std::string predictions_digest;
  std::string embeddings_digest;  // empty for term-frequency cosine
  std::vector<ScoredRecord> records;  // sorted by (task, model, train_size, example_id)
  std::vector<Aggregate> aggregates;  // sorted by GroupKey

  const Aggregate* find_aggregate(const GroupKey& key) const;
};

MetricVector score_record(const PredictionRecord& record, const ScoreConfig& config);

// Means are accumulated in record order, so recomputing from persisted
// scores reproduces them exactly.
std::vector<Aggregate> compute_aggregates(std::span<const ScoredRecord> records);

// Scores every record (in parallel up to config.jobs) and aggregates per
// (task, model, train_size). Throws InvalidArgument for an empty record set,
// ValidationError when embeddings are configured but missing for a record.
EvalRun score_run(std::span<const PredictionRecord> records, const ScoreConfig& config,
                  const std::string& predictions_digest = {});

// Exclusive advisory lock on a run directory (flock on <dir>/.lock). The
// lock file is removed on release. Throws IoError if another writer holds it.
class RunDirLock {
 public:
  explicit RunDirLock(const std::filesystem::path& dir);
  ~RunDirLock();
  RunDirLock(const RunDirLock&) = delete;
  RunDirLock& operator=(const RunDirLock&) = delete;

 private:
  std::filesystem::path path_;
  int fd_ = -1;
};

// <dir>/run.json (config snapshot, digests, aggregates) and <dir>/scores.csv
// (one row per record). Byte-identical for identical runs.
void save_run(const EvalRun& run, const std::filesystem::path& dir);
// Reads a run back and checks that the stored aggregates equal those
// recomputed from scores.csv; throws ValidationError otherwise.
EvalRun load_run(const std::filesystem::path& dir);

std::string scores_csv(const EvalRun& run);
std::vector<ScoredRecord> parse_scores_csv(std::string_view text);
nlohmann::ordered_json aggregate_to_json(const Aggregate& a);

}  // namespace sieval
