#include "sieval/sample.hpp"

#include <set>

#include "sieval/digest.hpp"
#include "sieval/errors.hpp"

namespace sieval {

nlohmann::ordered_json to_json(const Sample& sample) {
  nlohmann::ordered_json j;
  j["id"] = sample.id;
  j["task"] = std::string(to_string(sample.task));
  j["topic"] = sample.topic;
  j["context"] = sample.context;
  j["instruction"] = sample.instruction;
  j["gold_output"] = sample.gold_output;
  if (!sample.schema.empty()) {
    auto& schema = j["schema"] = nlohmann::ordered_json::array();
    for (const auto& f : sample.schema) {
      schema.push_back({{"name", f.name}, {"description", f.description}});
    }
  }
  return j;
}

namespace {

std::string string_field(const nlohmann::json& j, const char* name, bool required = true) {
  auto it = j.find(name);
  if (it == j.end()) {
    if (required) throw ValidationError(std::string("missing field '") + name + "'");
    return {};
  }
  if (!it->is_string()) throw ValidationError(std::string("field '") + name + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

Sample sample_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("sample must be a JSON object");
  Sample s;
  s.id = string_field(j, "id");
  try {
    s.task = parse_task(string_field(j, "task"));
  } catch (const InvalidArgument& e) {
    throw ValidationError(e.what());
  }
  s.topic = string_field(j, "topic", false);
  s.context = string_field(j, "context");
  s.instruction = string_field(j, "instruction");
  s.gold_output = string_field(j, "gold_output");
  if (auto it = j.find("schema"); it != j.end()) {
    if (!it->is_array()) throw ValidationError("field 'schema' must be an array");
    for (const auto& f : *it) {
      if (f.is_string()) {
        s.schema.push_back({f.get<std::string>(), ""});
      } else if (f.is_object() && f.contains("name") && f["name"].is_string()) {
        s.schema.push_back({f["name"].get<std::string>(), f.value("description", std::string())});
      } else {
        throw ValidationError("schema entries must be names or {name, description} objects");
      }
    }
  }
  if (s.id.empty()) throw ValidationError("field 'id' must be non-empty");
  return s;
}

std::vector<Sample> load_samples(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  std::vector<Sample> samples;
  std::size_t line_number = 0;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    const std::string_view line(content.data() + start, end - start);
    start = end + 1;
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      samples.push_back(sample_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_number) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_number) + ": " + e.what());
    }
  }
  return samples;
}

std::string samples_to_jsonl(const std::vector<Sample>& samples) {
  std::string out;
  for (const auto& s : samples) {
    out += to_json(s).dump(-1, ' ', false);
    out += "\n";
  }
  return out;
}

GoldVerdict validate_gold(const Sample& sample) {
  GoldVerdict verdict;
  switch (sample.task) {
    case Task::kJsonExtract:
    case Task::kNer: {
      std::optional<std::set<std::string>> required;
      if (sample.task == Task::kJsonExtract) {
        if (sample.schema.empty()) {
          verdict.violations.push_back({"schema", "missing-schema", "json-extract sample has no schema fields"});
        }
        required.emplace();
        for (const auto& f : sample.schema) required->insert(f.name);
      }
      const FlatJsonVerdict v = validate_ner_output(sample.gold_output, required);
      verdict.json_level = v.level_passed;
      verdict.violations.insert(verdict.violations.end(), v.violations.begin(), v.violations.end());
      break;
    }
    case Task::kKge: {
      const TripleSet triples = parse_kge_triples(sample.gold_output);
      verdict.triple_count = triples.triples.size();
      if (triples.triples.empty()) {
        verdict.violations.push_back({"gold_output", "no-triples", "no Subject－Relation－Object line found"});
      }
      for (const auto& bad : triples.malformed_lines) {
        verdict.violations.push_back({"gold_output:" + std::to_string(bad.line_number), bad.reason,
                                      "malformed triple line: " + bad.raw});
      }
      break;
    }
  }
  if (sample.task != Task::kJsonExtract) {
    const std::string zh = instruction_template(sample.task, {Language::kZh, {}, std::nullopt});
    const std::string en = instruction_template(sample.task, {Language::kEn, {}, std::nullopt});
    if (!sample.instruction.starts_with(zh) && !sample.instruction.starts_with(en)) {
      verdict.violations.push_back({"instruction", "template-prefix",
                                    "instruction does not open with the fixed task template"});
    }
  }
  verdict.passed = verdict.violations.empty();
  return verdict;
}

}  // namespace sieval
