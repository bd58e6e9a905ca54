#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sieval/task.hpp"

namespace sieval {

inline constexpr int kPredictionSchemaVersion = 1;

// One model output joined with its reference. Input lines look like
//   {"schema_version": 1, "example_id": "q-001", "task": "ner", "model": "ETLCH",
//    "train_size": 100, "output_text": "...", "reference_text": "..."}
// train_size is omitted (or null) for off-the-shelf baselines;
// schema_version defaults to 1 when absent.
struct PredictionRecord {
  std::string example_id;
  Task task = Task::kJsonExtract;
  std::string model;
  std::optional<int> train_size;
  std::string output_text;
  std::string reference_text;

  // "ETLCH-100" for a fine-tuned variant, the bare model name otherwise.
  std::string group_label() const;
};

std::string group_label(std::string_view model, const std::optional<int>& train_size);

struct Rejection {
  std::size_t line = 0;  // 1-based
  std::string reason;
};

struct LoadResult {
  std::vector<PredictionRecord> records;
  std::vector<Rejection> rejections;
  std::size_t total_lines = 0;  // == records.size() + rejections.size()
  std::string digest;           // sha256 of the raw bytes
};

// Parses newline-delimited JSON. Malformed lines, missing or mistyped
// fields, empty reference_text, unknown tasks or schema versions, blank
// lines and repeated (example_id, task, model, train_size) keys are rejected
// with their line number; a later duplicate is the one rejected.
LoadResult parse_predictions(std::string_view content);

// Throws IoError when unreadable, and ValidationError when `strict` and any
// line was rejected.
LoadResult load_predictions(const std::filesystem::path& path, bool strict);

}  // namespace sieval
