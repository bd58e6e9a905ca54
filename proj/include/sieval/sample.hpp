#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sieval/structure.hpp"
#include "sieval/task.hpp"
#include "sieval/templates.hpp"

namespace sieval {

// One annotated instruction-tuning example.
struct Sample {
  std::string id;
  Task task = Task::kJsonExtract;
  std::string topic;
  std::string context;      // the knowledge article
  std::string instruction;  // without the article appended
  std::string gold_output;
  std::vector<SchemaField> schema;  // json-extract only

  bool operator==(const Sample&) const = default;
};

nlohmann::ordered_json to_json(const Sample& sample);
// Throws ValidationError naming the offending field.
Sample sample_from_json(const nlohmann::json& j);

// Samples are stored one JSON object per line.
std::vector<Sample> load_samples(const std::filesystem::path& path);
std::string samples_to_jsonl(const std::vector<Sample>& samples);

struct GoldVerdict {
  bool passed = false;
  std::vector<Violation> violations;
  int json_level = -1;          // json-extract / ner
  std::size_t triple_count = 0;  // kge
};

// json-extract and ner: gold must reach level 3 (json-extract also needs
// every schema field present). kge: at least one triple and no malformed
// lines. kge/ner instructions must open with their fixed template (either
// language). Never throws.
GoldVerdict validate_gold(const Sample& sample);

}  // namespace sieval
