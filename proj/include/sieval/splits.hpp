#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sieval/errors.hpp"
#include "sieval/sample.hpp"

namespace sieval {

inline constexpr double kDefaultSplitRatio = 0.9;

struct TaskSplit {
  Task task = Task::kJsonExtract;
  std::size_t available = 0;   // samples of this task offered
  std::size_t invalid = 0;     // failed validate_gold
  std::size_t duplicates = 0;  // same context digest as an earlier sample
  std::vector<std::string> train_ids;
  std::vector<std::string> validation_ids;
  std::vector<std::string> held_out_ids;  // eligible but not selected
};

// scale_n samples per task; train + validation across the three tasks is
// exactly 3 * scale_n.
struct DatasetManifest {
  int scale_n = 0;
  double split_ratio = kDefaultSplitRatio;
  std::uint64_t seed = 0;
  std::vector<TaskSplit> tasks;  // json-extract, kge, ner
  std::vector<Sample> train;
  std::vector<Sample> validation;
  std::map<std::string, std::string> file_digests;  // file name -> sha256

  std::size_t combined_size() const { return train.size() + validation.size(); }
};

// Raised when a task has fewer than scale_n eligible samples.
class ShortfallError : public ValidationError {
 public:
  ShortfallError(Task task, std::size_t eligible, int scale_n);
  Task task;
};

// Keeps samples that pass validate_gold, dedups by (task, context digest),
// orders by id, shuffles per task with the seed, takes scale_n and splits
// round(scale_n * split_ratio) into train. Throws InvalidArgument for
// scale_n < 1 or split_ratio outside (0,1), ShortfallError for too few samples.
DatasetManifest assemble_splits(std::span<const Sample> samples, int scale_n, double split_ratio,
                                std::uint64_t seed);

// JSON array of {"instruction", "input", "output"} objects, UTF-8, LF endings.
std::string training_file_content(std::span<const Sample> split);

// Writes train.json and validation.json into `dir` and records their digests
// in the manifest. Re-emission of the same manifest is byte-identical.
void emit_training_files(DatasetManifest& manifest, const std::filesystem::path& dir);

nlohmann::ordered_json manifest_to_json(const DatasetManifest& manifest);

}  // namespace sieval
