#include "sieval/predictions.hpp"

#include <set>
#include <tuple>

#include <json.hpp>

#include "sieval/digest.hpp"
#include "sieval/errors.hpp"

namespace sieval {

std::string group_label(std::string_view model, const std::optional<int>& train_size) {
  std::string label(model);
  if (train_size) label += "-" + std::to_string(*train_size);
  return label;
}

std::string PredictionRecord::group_label() const { return sieval::group_label(model, train_size); }

namespace {

PredictionRecord parse_record(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("line is not a JSON object");
  if (auto it = j.find("schema_version"); it != j.end()) {
    if (!it->is_number_integer() || it->get<int>() != kPredictionSchemaVersion) {
      throw ValidationError("unsupported schema_version " + it->dump());
    }
  }
  const auto text = [&](const char* name) {
    auto it = j.find(name);
    if (it == j.end()) throw ValidationError(std::string("missing field '") + name + "'");
    if (!it->is_string()) throw ValidationError(std::string("field '") + name + "' must be a string");
    return it->get<std::string>();
  };
  PredictionRecord r;
  r.example_id = text("example_id");
  if (r.example_id.empty()) throw ValidationError("empty example_id");
  try {
    r.task = parse_task(text("task"));
  } catch (const InvalidArgument& e) {
    throw ValidationError(e.what());
  }
  r.model = text("model");
  if (r.model.empty()) throw ValidationError("empty model");
  if (auto it = j.find("train_size"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer() || it->get<long long>() <= 0 || it->get<long long>() > 1'000'000'000) {
      throw ValidationError("train_size must be a positive integer");
    }
    r.train_size = it->get<int>();
  }
  r.output_text = text("output_text");
  r.reference_text = text("reference_text");
  if (r.reference_text.empty()) throw ValidationError("empty reference_text");
  return r;
}

}  // namespace

LoadResult parse_predictions(std::string_view content) {
  LoadResult result;
  result.digest = sha256_hex(content);
  std::set<std::tuple<std::string, Task, std::string, std::optional<int>>> seen;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    start = end + 1;
    const std::size_t line_no = ++result.total_lines;
    if (line.ends_with('\r')) line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      result.rejections.push_back({line_no, "blank line"});
      continue;
    }
    try {
      PredictionRecord r = parse_record(line);
      if (!seen.emplace(r.example_id, r.task, r.model, r.train_size).second) {
        throw ValidationError("duplicate (example_id, task, model, train_size) = (" + r.example_id + ", " +
                              std::string(to_string(r.task)) + ", " + r.group_label() + ")");
      }
      result.records.push_back(std::move(r));
    } catch (const ValidationError& e) {
      result.rejections.push_back({line_no, e.what()});
    }
  }
  return result;
}

LoadResult load_predictions(const std::filesystem::path& path, bool strict) {
  LoadResult result = parse_predictions(read_file(path));
  if (strict && !result.rejections.empty()) {
    const Rejection& first = result.rejections.front();
    throw ValidationError(path.string() + ": " + std::to_string(result.rejections.size()) +
                          " rejected line(s); first at line " + std::to_string(first.line) + ": " +
                          first.reason);
  }
  return result;
}

}  // namespace sieval
