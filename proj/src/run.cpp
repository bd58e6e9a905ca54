#include "sieval/run.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <thread>

#include "sieval/csv.hpp"
#include "sieval/digest.hpp"
#include "sieval/errors.hpp"
#include "sieval/structure.hpp"

namespace sieval {

nlohmann::ordered_json config_snapshot(const ScoreConfig& config, const std::string& embeddings_digest) {
  nlohmann::ordered_json j;
  j["tokenizer"] = std::string(to_string(config.tokenizer));
  j["extract_json"] = config.extract_json;
  auto& methods = j["methods"] = nlohmann::ordered_json::array();
  for (TestMethod m : config.methods) methods.push_back(std::string(to_string(m)));
  j["alpha"] = config.alpha;
  j["unit_epsilon"] = config.unit_epsilon;
  j["count_epsilon"] = config.count_epsilon;
  j["bootstrap_resamples"] = config.bootstrap_resamples;
  j["seed"] = config.seed;
  j["continuity_correction"] = config.continuity_correction;
  j["cosine"] = embeddings_digest.empty() ? "term-frequency" : "embeddings";
  j["embeddings_digest"] = embeddings_digest.empty() ? nlohmann::ordered_json(nullptr)
                                                     : nlohmann::ordered_json(embeddings_digest);
  return j;
}

ScoreConfig config_from_snapshot(const nlohmann::json& j) {
  ScoreConfig c;
  try {
    c.tokenizer = parse_tokenizer_mode(j.at("tokenizer").get<std::string>());
    c.extract_json = j.at("extract_json").get<bool>();
    c.methods.clear();
    for (const auto& m : j.at("methods")) c.methods.push_back(parse_test_method(m.get<std::string>()));
    c.alpha = j.at("alpha").get<double>();
    c.unit_epsilon = j.at("unit_epsilon").get<double>();
    c.count_epsilon = j.at("count_epsilon").get<double>();
    c.bootstrap_resamples = j.at("bootstrap_resamples").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.continuity_correction = j.at("continuity_correction").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("run config snapshot: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ValidationError(std::string("run config snapshot: ") + e.what());
  }
  return c;
}

const Aggregate* EvalRun::find_aggregate(const GroupKey& key) const {
  auto it = std::lower_bound(aggregates.begin(), aggregates.end(), key,
                             [](const Aggregate& a, const GroupKey& k) { return a.key < k; });
  return it != aggregates.end() && it->key == key ? &*it : nullptr;
}

MetricVector score_record(const PredictionRecord& record, const ScoreConfig& config) {
  const TokenSequence cand = tokenize(record.output_text, config.tokenizer);
  const TokenSequence ref = tokenize(record.reference_text, config.tokenizer);
  MetricVector m;
  m.rouge1 = rouge_n(cand, ref, 1);
  m.rouge2 = rouge_n(cand, ref, 2);
  m.rougeL = rouge_l(cand, ref);
  m.cosine = cosine_tf(cand, ref);
  if (record.task == Task::kJsonExtract) {
    m.parse_level = validate_flat_json(record.output_text, {config.extract_json}).level_passed;
  }
  return m;
}

namespace {

using RecordKey = std::tuple<Task, std::string, std::optional<int>, std::string>;

RecordKey key_of(const ScoredRecord& r) { return {r.task, r.model, r.train_size, r.example_id}; }

struct EmbeddingPair {
  std::vector<double> output;
  std::vector<double> reference;
};

std::map<RecordKey, EmbeddingPair> load_embeddings(const std::filesystem::path& path) {
  std::map<RecordKey, EmbeddingPair> out;
  const std::string content = read_file(path);
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    const std::string_view line(content.data() + start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      std::optional<int> size;
      if (j.contains("train_size") && !j["train_size"].is_null()) size = j["train_size"].get<int>();
      RecordKey key{parse_task(j.at("task").get<std::string>()), j.at("model").get<std::string>(), size,
                    j.at("example_id").get<std::string>()};
      out[key] = {j.at("output_embedding").get<std::vector<double>>(),
                  j.at("reference_embedding").get<std::vector<double>>()};
    } catch (const std::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::vector<Aggregate> compute_aggregates(std::span<const ScoredRecord> records) {
  std::map<GroupKey, Aggregate> groups;
  for (const auto& r : records) {
    GroupKey key{r.task, r.model, r.train_size};
    Aggregate& a = groups[key];
    a.key = key;
    ++a.n;
    a.rouge1_f1 += r.metrics.rouge1.f1;
    a.rouge2_f1 += r.metrics.rouge2.f1;
    a.rougeL_f1 += r.metrics.rougeL.f1;
    a.cosine += r.metrics.cosine;
    if (r.metrics.parse_level) {
      for (int k = 0; k <= 3; ++k) {
        if (*r.metrics.parse_level >= k) ++a.level_counts[static_cast<std::size_t>(k)];
      }
    }
  }
  std::vector<Aggregate> out;
  for (auto& [key, a] : groups) {
    const double n = static_cast<double>(a.n);
    a.rouge1_f1 /= n;
    a.rouge2_f1 /= n;
    a.rougeL_f1 /= n;
    a.cosine /= n;
    a.parse_count = a.level_counts[0];
    out.push_back(a);
  }
  return out;
}

EvalRun score_run(std::span<const PredictionRecord> records, const ScoreConfig& config,
                  const std::string& predictions_digest) {
  if (records.empty()) throw InvalidArgument("score_run: no prediction records");
  std::map<RecordKey, EmbeddingPair> embeddings;
  std::string embeddings_digest;
  if (config.embeddings) {
    embeddings = load_embeddings(*config.embeddings);
    embeddings_digest = sha256_file(*config.embeddings);
  }

  std::vector<ScoredRecord> scored(records.size());
  const auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const PredictionRecord& p = records[i];
      scored[i] = {p.example_id, p.task, p.model, p.train_size, score_record(p, config)};
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(config.jobs, 1, records.size());
  if (jobs == 1) {
    work(0, records.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (records.size() + jobs - 1) / jobs;
    for (std::size_t w = 0; w < jobs; ++w) {
      const std::size_t begin = std::min(records.size(), w * chunk);
      pool.emplace_back(work, begin, std::min(records.size(), begin + chunk));
    }
    for (auto& t : pool) t.join();
  }

  if (config.embeddings) {
    std::vector<std::string> missing;
    for (auto& r : scored) {
      auto it = embeddings.find(key_of(r));
      if (it == embeddings.end()) {
        missing.push_back(r.example_id + "/" + group_label(r.model, r.train_size));
        continue;
      }
      r.metrics.cosine = cosine_dense(it->second.output, it->second.reference);
    }
    if (!missing.empty()) {
      throw ValidationError("embeddings missing for " + std::to_string(missing.size()) +
                            " record(s), first: " + missing.front());
    }
  }

  std::sort(scored.begin(), scored.end(),
            [](const ScoredRecord& a, const ScoredRecord& b) { return key_of(a) < key_of(b); });

  EvalRun run;
  run.config = config;
  run.config_digest = sha256_hex(config_snapshot(config, embeddings_digest).dump());
  run.embeddings_digest = embeddings_digest;
  run.predictions_digest = predictions_digest.empty() ? std::string(64, '0') : predictions_digest;
  run.run_id = sha256_hex(run.predictions_digest + ":" + run.config_digest).substr(0, 16);
  run.records = std::move(scored);
  run.aggregates = compute_aggregates(run.records);
  return run;
}

RunDirLock::RunDirLock(const std::filesystem::path& dir) : path_(dir / ".lock") {
  fd_ = ::open(path_.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
  if (fd_ < 0) throw IoError("cannot create lock file " + path_.string());
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw IoError("run directory " + dir.string() + " is locked by another writer");
  }
}

RunDirLock::~RunDirLock() {
  if (fd_ < 0) return;
  std::error_code ec;
  std::filesystem::remove(path_, ec);
  ::flock(fd_, LOCK_UN);
  ::close(fd_);
}

namespace {

const csv::Row kScoreHeader = {"example_id", "task",      "model",     "train_size", "rouge1_p",
                               "rouge1_r",   "rouge1_f1", "rouge2_p",  "rouge2_r",   "rouge2_f1",
                               "rougeL_p",   "rougeL_r",  "rougeL_f1", "cosine",     "parse_level"};

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ValidationError("scores.csv: bad number '" + s + "'");
  return v;
}

int parse_int(const std::string& s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ValidationError("scores.csv: bad integer '" + s + "'");
  return v;
}

}  // namespace

std::string scores_csv(const EvalRun& run) {
  std::vector<csv::Row> rows;
  rows.reserve(run.records.size());
  for (const auto& r : run.records) {
    const MetricVector& m = r.metrics;
    rows.push_back({r.example_id, std::string(to_string(r.task)), r.model,
                    r.train_size ? std::to_string(*r.train_size) : "",
                    csv::format_double(m.rouge1.precision), csv::format_double(m.rouge1.recall),
                    csv::format_double(m.rouge1.f1), csv::format_double(m.rouge2.precision),
                    csv::format_double(m.rouge2.recall), csv::format_double(m.rouge2.f1),
                    csv::format_double(m.rougeL.precision), csv::format_double(m.rougeL.recall),
                    csv::format_double(m.rougeL.f1), csv::format_double(m.cosine),
                    m.parse_level ? std::to_string(*m.parse_level) : ""});
  }
  return csv::format_table(kScoreHeader, rows);
}

std::vector<ScoredRecord> parse_scores_csv(std::string_view text) {
  const auto rows = csv::parse(text);
  if (rows.empty() || rows.front() != kScoreHeader) throw ValidationError("scores.csv: unexpected header");
  std::vector<ScoredRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != kScoreHeader.size()) {
      throw ValidationError("scores.csv: row " + std::to_string(i + 1) + " has " + std::to_string(row.size()) + " fields");
    }
    ScoredRecord r;
    r.example_id = row[0];
    try {
      r.task = parse_task(row[1]);
    } catch (const InvalidArgument& e) {
      throw ValidationError(std::string("scores.csv: ") + e.what());
    }
    r.model = row[2];
    if (!row[3].empty()) r.train_size = parse_int(row[3]);
    MetricVector& m = r.metrics;
    m.rouge1 = {parse_double(row[4]), parse_double(row[5]), parse_double(row[6])};
    m.rouge2 = {parse_double(row[7]), parse_double(row[8]), parse_double(row[9])};
    m.rougeL = {parse_double(row[10]), parse_double(row[11]), parse_double(row[12])};
    m.cosine = parse_double(row[13]);
    if (!row[14].empty()) m.parse_level = parse_int(row[14]);
    out.push_back(std::move(r));
  }
  return out;
}

nlohmann::ordered_json aggregate_to_json(const Aggregate& a) {
  nlohmann::ordered_json j;
  j["task"] = std::string(to_string(a.key.task));
  j["model"] = a.key.model;
  j["train_size"] = a.key.train_size ? nlohmann::ordered_json(*a.key.train_size) : nlohmann::ordered_json(nullptr);
  j["n"] = a.n;
  j["rouge1_f1"] = a.rouge1_f1;
  j["rouge2_f1"] = a.rouge2_f1;
  j["rougeL_f1"] = a.rougeL_f1;
  j["cosine"] = a.cosine;
  if (a.key.task == Task::kJsonExtract) {
    j["parse_count"] = a.parse_count;
    j["level_counts"] = a.level_counts;
  }
  return j;
}

void save_run(const EvalRun& run, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  RunDirLock lock(dir);
  const std::string scores = scores_csv(run);

  nlohmann::ordered_json j;
  j["format"] = "sieval-run";
  j["format_version"] = 1;
  j["run_id"] = run.run_id;
  j["config"] = config_snapshot(run.config, run.embeddings_digest);
  j["config_digest"] = run.config_digest;
  j["predictions_digest"] = run.predictions_digest;
  j["record_count"] = run.records.size();
  j["scores_digest"] = sha256_hex(scores);
  auto& aggs = j["aggregates"] = nlohmann::ordered_json::array();
  for (const auto& a : run.aggregates) aggs.push_back(aggregate_to_json(a));

  write_file(dir / "scores.csv", scores);
  write_file(dir / "run.json", j.dump(2, ' ', false) + "\n");
}

EvalRun load_run(const std::filesystem::path& dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(dir / "run.json"));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError((dir / "run.json").string() + ": " + e.what());
  }
  const std::string scores = read_file(dir / "scores.csv");
  EvalRun run;
  try {
    if (j.at("format").get<std::string>() != "sieval-run") throw ValidationError("not a run directory");
    run.run_id = j.at("run_id").get<std::string>();
    run.config_digest = j.at("config_digest").get<std::string>();
    run.predictions_digest = j.at("predictions_digest").get<std::string>();
    run.config = config_from_snapshot(j.at("config"));
    if (j.at("scores_digest").get<std::string>() != sha256_hex(scores)) {
      throw ValidationError("scores.csv does not match the digest recorded in run.json");
    }
    const auto& emb = j.at("config").at("embeddings_digest");
    run.embeddings_digest = emb.is_string() ? emb.get<std::string>() : std::string();
    if (sha256_hex(config_snapshot(run.config, run.embeddings_digest).dump()) != run.config_digest) {
      throw ValidationError("run.json config does not match its config_digest");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError((dir / "run.json").string() + ": " + e.what());
  }
  run.records = parse_scores_csv(scores);
  run.aggregates = compute_aggregates(run.records);

  nlohmann::ordered_json recomputed = nlohmann::ordered_json::array();
  for (const auto& a : run.aggregates) recomputed.push_back(aggregate_to_json(a));
  if (nlohmann::json::parse(recomputed.dump()) != j.at("aggregates")) {
    throw ValidationError("stored aggregates differ from those recomputed from scores.csv");
  }
  return run;
}

}  // namespace sieval
