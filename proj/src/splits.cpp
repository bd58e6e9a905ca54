#include "sieval/splits.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sieval/digest.hpp"
#include "sieval/errors.hpp"
#include "sieval/rng.hpp"

namespace sieval {

ShortfallError::ShortfallError(Task t, std::size_t eligible, int scale_n)
    : ValidationError("insufficient " + std::string(to_string(t)) + " samples: need " +
                      std::to_string(scale_n) + ", have " + std::to_string(eligible) +
                      " valid unique samples (shortfall " +
                      std::to_string(static_cast<std::size_t>(scale_n) - eligible) + ")"),
      task(t) {}

DatasetManifest assemble_splits(std::span<const Sample> samples, int scale_n, double split_ratio,
                                std::uint64_t seed) {
  if (scale_n < 1) throw InvalidArgument("assemble_splits: scale must be >= 1");
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
    throw InvalidArgument("assemble_splits: split ratio must lie strictly between 0 and 1");
  }
  {
    std::set<std::string> ids;
    for (const auto& s : samples) {
      if (!ids.insert(s.id).second) throw ValidationError("duplicate sample id '" + s.id + "'");
    }
  }

  DatasetManifest manifest;
  manifest.scale_n = scale_n;
  manifest.split_ratio = split_ratio;
  manifest.seed = seed;
  const auto n = static_cast<std::size_t>(scale_n);
  const auto n_train = static_cast<std::size_t>(
      std::clamp<long long>(std::llround(static_cast<double>(n) * split_ratio), 0, scale_n));

  for (std::size_t t = 0; t < kAllTasks.size(); ++t) {
    const Task task = kAllTasks[t];
    TaskSplit split;
    split.task = task;
    std::vector<const Sample*> pool;
    for (const auto& s : samples) {
      if (s.task == task) pool.push_back(&s);
    }
    split.available = pool.size();
    std::sort(pool.begin(), pool.end(), [](const Sample* a, const Sample* b) { return a->id < b->id; });

    std::vector<const Sample*> eligible;
    std::set<std::string> contexts;
    for (const Sample* s : pool) {
      if (!validate_gold(*s).passed) {
        ++split.invalid;
      } else if (!contexts.insert(sha256_hex(s->context)).second) {
        ++split.duplicates;
      } else {
        eligible.push_back(s);
      }
    }
    if (eligible.size() < n) throw ShortfallError(task, eligible.size(), scale_n);

    SplitMix64 rng = derive_stream(seed, t);
    for (std::size_t i = eligible.size(); i > 1; --i) {
      std::swap(eligible[i - 1], eligible[rng.below(i)]);
    }
    for (std::size_t i = 0; i < eligible.size(); ++i) {
      const Sample& s = *eligible[i];
      if (i < n_train) {
        split.train_ids.push_back(s.id);
        manifest.train.push_back(s);
      } else if (i < n) {
        split.validation_ids.push_back(s.id);
        manifest.validation.push_back(s);
      } else {
        split.held_out_ids.push_back(s.id);
      }
    }
    std::sort(split.held_out_ids.begin(), split.held_out_ids.end());
    manifest.tasks.push_back(std::move(split));
  }
  return manifest;
}

std::string training_file_content(std::span<const Sample> split) {
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (const auto& s : split) {
    records.push_back({{"instruction", s.instruction}, {"input", s.context}, {"output", s.gold_output}});
  }
  return records.dump(2, ' ', false) + "\n";
}

void emit_training_files(DatasetManifest& manifest, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, split] : {std::pair{"train.json", &manifest.train},
                                    std::pair{"validation.json", &manifest.validation}}) {
    for (const auto& s : *split) {
      if (!validate_gold(s).passed) {
        throw ValidationError("refusing to emit sample '" + s.id + "': gold output fails validation");
      }
    }
    const std::string content = training_file_content(*split);
    write_file(dir / name, content);
    manifest.file_digests[name] = sha256_hex(content);
  }
}

nlohmann::ordered_json manifest_to_json(const DatasetManifest& manifest) {
  nlohmann::ordered_json j;
  j["scale_n"] = manifest.scale_n;
  j["split_ratio"] = manifest.split_ratio;
  j["seed"] = manifest.seed;
  j["train_count"] = manifest.train.size();
  j["validation_count"] = manifest.validation.size();
  j["combined_count"] = manifest.combined_size();
  auto& tasks = j["tasks"] = nlohmann::ordered_json::object();
  for (const auto& split : manifest.tasks) {
    auto& t = tasks[std::string(to_string(split.task))];
    t["available"] = split.available;
    t["invalid"] = split.invalid;
    t["duplicates"] = split.duplicates;
    t["train_ids"] = split.train_ids;
    t["validation_ids"] = split.validation_ids;
    t["held_out_ids"] = split.held_out_ids;
  }
  j["files"] = manifest.file_digests;
  return j;
}

}  // namespace sieval
