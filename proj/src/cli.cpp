#include "sieval/cli.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "sieval/chat_client.hpp"
#include "sieval/csv.hpp"
#include "sieval/digest.hpp"
#include "sieval/errors.hpp"
#include "sieval/generate.hpp"
#include "sieval/plot.hpp"
#include "sieval/predictions.hpp"
#include "sieval/report.hpp"
#include "sieval/run.hpp"
#include "sieval/sample.hpp"
#include "sieval/splits.hpp"
#include "sieval/trainer_config.hpp"

namespace sieval::cli {

namespace fs = std::filesystem;

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

namespace {

struct Options {
  std::size_t jobs = 0;

  struct {
    std::vector<std::string> tasks{"json-extract", "kge", "ner"};
    std::size_t count = 0;
    std::string topics;
    bool offline = false;
    std::string fixtures;
    EndpointConfig endpoint;
    int timeout_seconds = 120;
    std::string language = "zh";
    int max_retries = 2;
    std::size_t max_context_tokens = kContextTokenCap;
    std::size_t in_flight = 4;
    std::string out;
  } generate;

  struct {
    std::string samples;
  } validate;

  struct {
    std::string samples;
    int scale = 100;
    double split_ratio = kDefaultSplitRatio;
    std::uint64_t seed = 20240917;
    std::string out;
    TrainerConfig trainer;
  } emit;

  struct {
    std::string predictions;
    std::string out;
    std::string tokenizer = "cjk-char";
    bool extract_json = false;
    std::vector<std::string> methods{"paired-t"};
    double alpha = kDefaultAlpha;
    double unit_epsilon = kUnitMetricEpsilon;
    double count_epsilon = kCountEpsilon;
    std::size_t resamples = 10000;
    std::uint64_t seed = 20240917;
    bool continuity_correction = false;
    std::string embeddings;
    bool lenient = false;
  } score;

  struct {
    std::string run;
    std::string subject;
    std::vector<std::string> baselines;
    std::vector<std::string> methods;
    std::vector<std::int64_t> counts;
    double alpha = kDefaultAlpha;
    bool continuity_correction = false;
  } sigtest;

  struct {
    std::string run;
    std::string subject;
    std::vector<std::string> baselines;
  } winrate;

  struct {
    std::string run;
    std::string subject;
    std::string points;
    std::string metric = "value";
    double epsilon = kUnitMetricEpsilon;
  } curve;

  struct {
    std::string run;
    std::string subject;
    std::vector<std::string> baselines;
  } report;

  struct {
    std::string run;
    std::string subject;
    std::string input;
    std::string kind = "bar";
    std::string out;
    std::string title;
    std::string x_label;
    std::string y_label;
  } plot;
};

std::size_t effective_jobs(std::size_t jobs) {
  return jobs != 0 ? jobs : std::max(1u, std::thread::hardware_concurrency());
}

template <typename Parse>
auto tag_check(Parse parse) {
  return CLI::Validator(
      [parse](std::string& value) -> std::string {
        try {
          parse(value);
          return {};
        } catch (const std::exception& e) {
          return e.what();
        }
      },
      "", "");
}

// ---- forge ----

int cmd_generate(const Options& o, std::ostream&, std::ostream& err) {
  GenerationOptions gen;
  gen.language = parse_language(o.generate.language);
  gen.max_retries = o.generate.max_retries;
  gen.max_context_tokens = o.generate.max_context_tokens;
  gen.in_flight = o.generate.in_flight;

  std::vector<std::string> listed;
  if (!o.generate.topics.empty()) {
    std::istringstream in(read_file(o.generate.topics));
    for (std::string line; std::getline(in, line);) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) listed.push_back(line);
    }
  }

  std::unique_ptr<ChatClient> client;
  FixtureChatClient* fixtures = nullptr;
  if (o.generate.offline) {
    if (o.generate.fixtures.empty()) throw InvalidArgument("--offline needs --fixtures DIR");
    auto f = std::make_unique<FixtureChatClient>(o.generate.fixtures);
    fixtures = f.get();
    client = std::move(f);
  } else {
    if (listed.empty()) throw InvalidArgument("online generation needs --topics FILE");
    EndpointConfig endpoint = o.generate.endpoint;
    endpoint.timeout = std::chrono::seconds(o.generate.timeout_seconds);
    client = std::make_unique<HttpChatClient>(endpoint);
  }

  std::vector<Sample> all;
  std::size_t shortfall = 0;
  bool network = false;
  for (const auto& tag : o.generate.tasks) {
    const Task task = parse_task(tag);
    const std::vector<std::string> topics = listed.empty() ? fixtures->topics(task) : listed;
    const std::size_t count = o.generate.count == 0 ? topics.size() : o.generate.count;
    GenerationResult result = generate_samples(*client, topics, task, count, gen);
    for (const auto& d : result.dropped) {
      err << "dropped " << tag << " topic '" << d.topic << "': " << d.reason << "\n";
      network = network || d.network;
    }
    err << tag << ": " << result.samples.size() << " of " << result.requested << " samples\n";
    shortfall += result.shortfall();
    for (auto& s : result.samples) all.push_back(std::move(s));
  }
  const fs::path path(o.generate.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_file(path, samples_to_jsonl(all));
  err << "wrote " << all.size() << " samples to " << path.string() << "\n";
  if (network) return kIo;
  if (shortfall > 0) {
    err << "shortfall: " << shortfall << " samples\n";
    return kValidation;
  }
  return kOk;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  const auto samples = load_samples(o.validate.samples);
  nlohmann::ordered_json report;
  auto failed = nlohmann::ordered_json::array();
  for (const auto& s : samples) {
    const GoldVerdict v = validate_gold(s);
    if (v.passed) continue;
    nlohmann::ordered_json f;
    f["id"] = s.id;
    f["task"] = to_string(s.task);
    auto& violations = f["violations"] = nlohmann::ordered_json::array();
    for (const auto& viol : v.violations) {
      violations.push_back({{"path", viol.path}, {"rule", viol.rule}, {"message", viol.message}});
    }
    failed.push_back(std::move(f));
  }
  report["total"] = samples.size();
  report["passed"] = samples.size() - failed.size();
  report["failed"] = failed;
  out << report.dump(2) << "\n";
  err << samples.size() - failed.size() << " of " << samples.size() << " samples pass validation\n";
  return failed.empty() ? kOk : kValidation;
}

int cmd_emit(const Options& o, std::ostream& out, std::ostream& err) {
  validate(o.emit.trainer);
  const auto samples = load_samples(o.emit.samples);
  DatasetManifest manifest = assemble_splits(samples, o.emit.scale, o.emit.split_ratio, o.emit.seed);
  const fs::path dir(o.emit.out);
  emit_training_files(manifest, dir);
  const std::string trainer = render_trainer_config(o.emit.trainer);
  write_file(dir / "trainer_config.yaml", trainer);
  manifest.file_digests["trainer_config.yaml"] = sha256_hex(trainer);
  write_file(dir / "manifest.json", manifest_to_json(manifest).dump(2) + "\n");
  for (const auto& [name, digest] : manifest.file_digests) out << digest << "  " << name << "\n";
  err << "emitted " << manifest.train.size() << " train + " << manifest.validation.size()
      << " validation records to " << dir.string() << "\n";
  return kOk;
}

// ---- evaluation ----

ScoreConfig score_config(const Options& o) {
  ScoreConfig c;
  c.tokenizer = parse_tokenizer_mode(o.score.tokenizer);
  c.extract_json = o.score.extract_json;
  c.methods.clear();
  for (const auto& m : o.score.methods) c.methods.push_back(parse_test_method(m));
  if (c.methods.empty()) throw InvalidArgument("--method needs at least one test");
  for (TestMethod m : c.methods) {
    if (m == TestMethod::kTwoPropZ) throw InvalidArgument("--method takes paired tests; two-prop-z is applied to parse counts");
  }
  c.alpha = o.score.alpha;
  c.unit_epsilon = o.score.unit_epsilon;
  c.count_epsilon = o.score.count_epsilon;
  c.bootstrap_resamples = o.score.resamples;
  c.seed = o.score.seed;
  c.continuity_correction = o.score.continuity_correction;
  c.jobs = effective_jobs(o.jobs);
  if (!o.score.embeddings.empty()) c.embeddings = fs::path(o.score.embeddings);
  return c;
}

int cmd_score(const Options& o, std::ostream& out, std::ostream& err) {
  const ScoreConfig config = score_config(o);
  const LoadResult loaded = load_predictions(o.score.predictions, false);
  for (const auto& r : loaded.rejections) err << o.score.predictions << ":" << r.line << ": " << r.reason << "\n";
  if (!o.score.lenient && !loaded.rejections.empty()) {
    err << loaded.rejections.size() << " of " << loaded.total_lines
        << " lines rejected; strict mode refuses to score (use --no-strict to skip them)\n";
    return kValidation;
  }
  const EvalRun run = score_run(loaded.records, config, loaded.digest);
  save_run(run, o.score.out);
  out << run.run_id << "\n";
  err << "scored " << run.records.size() << " records in " << run.aggregates.size() << " groups into "
      << o.score.out << "\n";
  return kOk;
}

EvalRun open_run(const std::string& dir, std::size_t jobs) {
  EvalRun run = load_run(dir);
  run.config.jobs = effective_jobs(jobs);
  return run;
}

int cmd_sigtest(const Options& o, std::ostream& out, std::ostream& err) {
  const auto& s = o.sigtest;
  if (!s.counts.empty()) {
    if (!s.run.empty()) throw InvalidArgument("--counts and --run are exclusive");
    const SignificanceResult r =
        two_prop_z(s.counts[0], s.counts[1], s.counts[2], s.counts[3], {s.alpha, s.continuity_correction});
    nlohmann::ordered_json j{{"method", to_string(r.method)},
                             {"statistic", r.statistic},
                             {"p_two_tailed", r.p_two_tailed},
                             {"log10_p", r.log10_p},
                             {"n1", r.n1},
                             {"n2", r.n2},
                             {"alpha", r.alpha},
                             {"significant", r.significant},
                             {"degenerate", r.degenerate}};
    out << j.dump(2) << "\n";
    err << "p = " << r.p_two_tailed << (r.significant ? " (significant)" : " (not significant)") << "\n";
    return kOk;
  }
  if (s.run.empty() || s.subject.empty() || s.baselines.empty()) {
    throw InvalidArgument("sigtest needs --counts K1 N1 K2 N2, or --run, --subject and --baseline");
  }
  EvalRun run = open_run(s.run, o.jobs);
  if (!s.methods.empty()) {
    run.config.methods.clear();
    for (const auto& m : s.methods) run.config.methods.push_back(parse_test_method(m));
  }
  out << significance_document(run, {s.subject, s.baselines});
  return kOk;
}

int cmd_winrate(const Options& o, std::ostream& out, std::ostream&) {
  const EvalRun run = open_run(o.winrate.run, o.jobs);
  out << winrate_table(run, {o.winrate.subject, o.winrate.baselines});
  return kOk;
}

std::vector<CurvePoint> parse_points(const std::string& text) {
  std::vector<CurvePoint> points;
  std::istringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw InvalidArgument("point '" + item + "' is not SIZE:VALUE");
    try {
      std::size_t used = 0;
      const std::string size = item.substr(0, colon);
      const std::string value = item.substr(colon + 1);
      const long long n = std::stoll(size, &used);
      if (used != size.size()) throw std::invalid_argument(size);
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      points.push_back({n, v});
    } catch (const std::logic_error&) {
      throw InvalidArgument("point '" + item + "' is not SIZE:VALUE");
    }
  }
  return points;
}

int cmd_curve(const Options& o, std::ostream& out, std::ostream& err) {
  const auto& c = o.curve;
  if (!c.points.empty()) {
    const EfficiencyCurve curve = efficiency_curve(c.metric, parse_points(c.points), c.epsilon);
    std::vector<csv::Row> rows;
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
      rows.push_back({curve.metric, std::to_string(curve.points[i].train_size), csv::format_double(curve.points[i].value),
                      i == 0 ? std::string() : csv::format_double(curve.marginal_gains[i - 1].delta),
                      curve.plateau_size ? std::to_string(*curve.plateau_size) : std::string()});
    }
    out << csv::format_table({"metric", "train_size", "value", "gain", "plateau_size"}, rows);
    err << "plateau: " << (curve.plateau_size ? std::to_string(*curve.plateau_size) : std::string("none")) << "\n";
    return kOk;
  }
  if (c.run.empty() || c.subject.empty()) throw InvalidArgument("curve needs --points, or --run and --subject");
  const EvalRun run = open_run(c.run, o.jobs);
  if (subject_model(run, c.subject).empty()) throw ValidationError("no groups for subject '" + c.subject + "'");
  out << efficiency_table(run, {c.subject, {}});
  return kOk;
}

int cmd_report(const Options& o, std::ostream& out, std::ostream& err) {
  const EvalRun run = open_run(o.report.run, o.jobs);
  RunDirLock lock(o.report.run);
  const auto files = build_report(run, {o.report.subject, o.report.baselines}, fs::path(o.report.run) / "reports");
  for (const auto& f : files) out << f.string() << "\n";
  err << "wrote " << files.size() << " report files\n";
  return kOk;
}

PlotSpec spec_from_csv(const Options& o) {
  const auto rows = csv::parse(read_file(o.plot.input));
  if (rows.empty()) throw ValidationError(o.plot.input + ": empty table");
  const auto& head = rows.front();
  const auto column = [&](const char* name) -> std::optional<std::size_t> {
    const auto it = std::find(head.begin(), head.end(), name);
    if (it == head.end()) return std::nullopt;
    return static_cast<std::size_t>(it - head.begin());
  };
  const auto y = column("y");
  if (!y) throw ValidationError(o.plot.input + ": needs a 'y' column");
  const auto series = column("series"), label = column("label"), x = column("x");
  PlotSpec spec{parse_plot_kind(o.plot.kind), o.plot.title, o.plot.x_label, o.plot.y_label, {}};
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != head.size()) {
      throw ValidationError(o.plot.input + ": row " + std::to_string(i + 1) + " has " + std::to_string(row.size()) +
                            " fields, expected " + std::to_string(head.size()));
    }
    const std::string name = series ? row[*series] : std::string();
    auto it = std::find_if(spec.series.begin(), spec.series.end(), [&](const PlotSeries& s) { return s.name == name; });
    if (it == spec.series.end()) it = spec.series.insert(spec.series.end(), PlotSeries{name, {}});
    try {
      it->points.push_back({label ? row[*label] : std::string(), x ? std::stod(row[*x]) : 0.0, std::stod(row[*y])});
    } catch (const std::logic_error&) {
      throw ValidationError(o.plot.input + ": row " + std::to_string(i + 1) + " has a non-numeric value");
    }
  }
  return spec;
}

int cmd_plot(const Options& o, std::ostream& out, std::ostream& err) {
  if (!o.plot.input.empty()) {
    if (o.plot.out.empty()) throw InvalidArgument("--input needs --out FILE.svg");
    const fs::path path(o.plot.out);
    const PlotSpec spec = spec_from_csv(o);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    emit_plot(spec, path);
    out << path.string() << "\n";
    return kOk;
  }
  if (o.plot.run.empty()) throw InvalidArgument("plot needs --run DIR, or --input CSV and --out FILE");
  const EvalRun run = open_run(o.plot.run, o.jobs);
  RunDirLock lock(o.plot.run);
  const auto files = emit_run_plots(run, o.plot.subject, fs::path(o.plot.run) / "reports" / "plots");
  for (const auto& f : files) out << f.string() << "\n";
  err << "wrote " << files.size() << " plots\n";
  return kOk;
}

// ---- parsing ----

const CLI::App* deepest(const CLI::App* app) {
  for (const CLI::App* sub : app->get_subcommands()) return deepest(sub);
  return app;
}

std::string command_path(const CLI::App* app) {
  std::string path = app->get_name();
  for (const CLI::App* p = app->get_parent(); p != nullptr; p = p->get_parent()) path = p->get_name() + " " + path;
  return path;
}

std::string suggest(const CLI::App* node, const std::string& token) {
  std::vector<std::string> candidates;
  if (token.starts_with("-")) {
    for (const CLI::App* a = node; a != nullptr; a = a->get_parent()) {
      for (const CLI::Option* opt : a->get_options()) {
        for (const auto& name : opt->get_lnames()) candidates.push_back("--" + name);
      }
    }
  } else {
    for (const CLI::App* sub : node->get_subcommands({})) candidates.push_back(sub->get_name());
  }
  std::string best;
  std::size_t best_distance = std::max<std::size_t>(2, token.size() / 3) + 1;
  for (const auto& c : candidates) {
    const std::size_t d = edit_distance(token, c);
    if (d < best_distance) {
      best_distance = d;
      best = c;
    }
  }
  return best;
}

int usage_error(const CLI::App& app, const std::string& message, std::ostream& err) {
  const CLI::App* node = deepest(&app);
  const auto extras = node->remaining();
  if (!extras.empty()) {
    const std::string& token = extras.front();
    err << "error: unexpected argument '" << token << "'";
    if (const std::string hint = suggest(node, token); !hint.empty()) err << "; did you mean '" << hint << "'?";
    err << "\n";
  } else {
    err << "error: " << message << "\n";
  }
  err << "run '" << command_path(node) << " --help' for usage\n";
  return kUsage;
}

// Flags show no default in CLI11 help; name it in the description instead.
CLI::Option* flag(CLI::App* app, const std::string& name, bool& value, const std::string& description) {
  return app->add_flag(name, value, description + " [default: " + (value ? "on" : "off") + "]");
}

// Also labels options without a default as [none], so help lists a default
// for every option.
void finish_tree(CLI::App* app) {
  app->allow_extras();
  for (CLI::Option* opt : app->get_options({})) {
    if (opt->get_expected_min() > 0 && !opt->get_required() && opt->get_default_str().empty()) {
      opt->default_str("none");
    }
  }
  for (CLI::App* sub : app->get_subcommands({})) finish_tree(sub);
}

}  // namespace

int run_command(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Structured-extraction dataset forging, scoring and significance analysis.", "sieval"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "Read flags from a TOML or INI file (command line wins)");
  app.add_option("--jobs", o.jobs, "Worker threads, 0 for one per core (results do not depend on it)");

  // forge
  CLI::App* forge = app.add_subcommand("forge", "Build and validate instruction datasets");
  CLI::App* gen = forge->add_subcommand("generate", "Generate samples from a chat endpoint or fixtures");
  auto& g = o.generate;
  gen->add_option("--task", g.tasks, "Tasks to generate (repeatable)")->check(tag_check(parse_task));
  gen->add_option("--count", g.count, "Samples per task, 0 for one per topic");
  gen->add_option("--topics", g.topics, "Topic list, one per line (offline default: fixture topics)");
  flag(gen, "--offline", g.offline, "Answer requests from --fixtures instead of the network");
  gen->add_option("--fixtures", g.fixtures, "Fixture directory for --offline");
  gen->add_option("--base-url", g.endpoint.base_url, "Chat-completions base URL");
  gen->add_option("--model", g.endpoint.model, "Generator model name");
  gen->add_option("--api-key-env", g.endpoint.api_key_env, "Environment variable holding the API key");
  gen->add_option("--timeout", g.timeout_seconds, "Per-request timeout in seconds")->check(CLI::PositiveNumber);
  gen->add_option("--temperature", g.endpoint.temperature, "Sampling temperature")->check(CLI::Range(0.0, 2.0));
  gen->add_option("--language", g.language, "Instruction language")->check(CLI::IsMember({"zh", "en"}));
  gen->add_option("--max-retries", g.max_retries, "Extra attempts per generation stage")->check(CLI::NonNegativeNumber);
  gen->add_option("--max-context-tokens", g.max_context_tokens, "Article length cap in estimated tokens");
  gen->add_option("--in-flight", g.in_flight, "Concurrent topics")->check(CLI::PositiveNumber);
  gen->add_option("--out", g.out, "Output samples file (JSONL)")->required();

  CLI::App* val = forge->add_subcommand("validate", "Check every sample's gold output against its task validator");
  val->add_option("--samples", o.validate.samples, "Samples file (JSONL)")->required();

  CLI::App* emit = forge->add_subcommand("emit", "Assemble scale-N splits and write training files");
  auto& e = o.emit;
  emit->add_option("--samples", e.samples, "Samples file (JSONL)")->required();
  emit->add_option("--scale", e.scale, "Samples per task")->check(CLI::PositiveNumber);
  emit->add_option("--split-ratio", e.split_ratio, "Train fraction of each task's samples")->check(CLI::Range(0.0, 1.0));
  emit->add_option("--seed", e.seed, "Selection and split seed");
  emit->add_option("--out", e.out, "Output directory")->required();
  emit->add_option("--base-model", e.trainer.base_model, "Base model identifier");
  emit->add_option("--lora-rank", e.trainer.lora_rank, "LoRA rank");
  emit->add_option("--lora-alpha", e.trainer.lora_alpha, "LoRA alpha");
  emit->add_option("--lora-dropout", e.trainer.lora_dropout, "LoRA dropout");
  emit->add_option("--learning-rate", e.trainer.learning_rate, "Learning rate");
  emit->add_option("--max-grad-norm", e.trainer.max_grad_norm, "Gradient clipping norm");
  emit->add_option("--epochs", e.trainer.epochs, "Training epochs");
  emit->add_option("--batch-size", e.trainer.effective_batch_size, "Effective batch size");
  emit->add_option("--quantization", e.trainer.quantization, "Quantization (none)");

  // score
  CLI::App* score = app.add_subcommand("score", "Score a prediction file into a run directory");
  auto& s = o.score;
  score->add_option("--predictions", s.predictions, "Predictions file (JSONL)")->required();
  score->add_option("--out", s.out, "Run directory")->required();
  score->add_option("--tokenizer", s.tokenizer, "Tokenizer: cjk-char or whitespace")
      ->check(tag_check(parse_tokenizer_mode));
  flag(score, "--extract-json", s.extract_json, "Validate the longest {...} span of JSON outputs");
  score->add_option("--method", s.methods, "Paired tests: paired-t, wilcoxon, bootstrap (repeatable)")
      ->check(tag_check(parse_test_method));
  score->add_option("--alpha", s.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
  score->add_option("--unit-epsilon", s.unit_epsilon, "Plateau threshold for unit-interval metrics");
  score->add_option("--count-epsilon", s.count_epsilon, "Plateau threshold for parse counts");
  score->add_option("--resamples", s.resamples, "Bootstrap resamples")->check(CLI::PositiveNumber);
  score->add_option("--seed", s.seed, "Bootstrap seed");
  flag(score, "--continuity-correction", s.continuity_correction, "Continuity-corrected z-test");
  score->add_option("--embeddings", s.embeddings, "Embedding vectors (JSONL) for cosine instead of term frequency");
  flag(score, "--no-strict", s.lenient, "Score accepted lines even when some are rejected");

  // analyses
  CLI::App* sig = app.add_subcommand("sigtest", "Significance tests on a run or on raw counts");
  sig->add_option("--run", o.sigtest.run, "Run directory");
  sig->add_option("--subject", o.sigtest.subject, "Subject model or group label");
  sig->add_option("--baseline", o.sigtest.baselines, "Baseline model or group label (repeatable)");
  sig->add_option("--method", o.sigtest.methods, "Override the run's paired tests (repeatable)")
      ->check(tag_check(parse_test_method));
  sig->add_option("--counts", o.sigtest.counts, "Two-proportion z-test on K1 N1 K2 N2")->expected(4);
  sig->add_option("--alpha", o.sigtest.alpha, "Significance level for --counts")->check(CLI::Range(0.0, 1.0));
  flag(sig, "--continuity-correction", o.sigtest.continuity_correction, "Continuity correction for --counts");

  CLI::App* win = app.add_subcommand("winrate", "Winning-rate table of a subject against baselines");
  win->add_option("--run", o.winrate.run, "Run directory")->required();
  win->add_option("--subject", o.winrate.subject, "Subject model or group label")->required();
  win->add_option("--baseline", o.winrate.baselines, "Baseline model or group label (repeatable)")->required();

  CLI::App* curve = app.add_subcommand("curve", "Efficiency curve and plateau");
  curve->add_option("--run", o.curve.run, "Run directory");
  curve->add_option("--subject", o.curve.subject, "Subject model");
  curve->add_option("--points", o.curve.points, "Ad-hoc curve SIZE:VALUE,SIZE:VALUE,...");
  curve->add_option("--metric", o.curve.metric, "Metric name for --points");
  curve->add_option("--epsilon", o.curve.epsilon, "Plateau threshold for --points");

  CLI::App* rep = app.add_subcommand("report", "Write report tables into RUN/reports");
  rep->add_option("--run", o.report.run, "Run directory")->required();
  rep->add_option("--subject", o.report.subject, "Subject model or group label");
  rep->add_option("--baseline", o.report.baselines, "Baseline model or group label (repeatable)");

  CLI::App* plot = app.add_subcommand("plot", "Write SVG plots");
  plot->add_option("--run", o.plot.run, "Run directory (plots go to RUN/reports/plots)");
  plot->add_option("--subject", o.plot.subject, "Subject model for efficiency plots");
  plot->add_option("--input", o.plot.input, "CSV with a y column and optional series, label, x columns");
  plot->add_option("--kind", o.plot.kind, "Plot kind for --input: bar or line")->check(CLI::IsMember({"bar", "line"}));
  plot->add_option("--out", o.plot.out, "SVG file for --input");
  plot->add_option("--title", o.plot.title, "Title for --input");
  plot->add_option("--x-label", o.plot.x_label, "X axis label for --input");
  plot->add_option("--y-label", o.plot.y_label, "Y axis label for --input");

  finish_tree(&app);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << deepest(&app)->help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& ex) {
    return usage_error(app, ex.what(), err);
  }
  if (!deepest(&app)->remaining().empty()) return usage_error(app, "", err);

  const CLI::App* leaf = deepest(&app);
  if (leaf == &app || leaf == forge) {
    err << "error: a subcommand is required\n";
    out << leaf->help();
    return kUsage;
  }

  try {
    if (leaf == gen) return cmd_generate(o, out, err);
    if (leaf == val) return cmd_validate(o, out, err);
    if (leaf == emit) return cmd_emit(o, out, err);
    if (leaf == score) return cmd_score(o, out, err);
    if (leaf == sig) return cmd_sigtest(o, out, err);
    if (leaf == win) return cmd_winrate(o, out, err);
    if (leaf == curve) return cmd_curve(o, out, err);
    if (leaf == rep) return cmd_report(o, out, err);
    if (leaf == plot) return cmd_plot(o, out, err);
  } catch (const InvalidArgument& ex) {
    err << "error: " << ex.what() << "\n";
    return kUsage;
  } catch (const ValidationError& ex) {
    err << "validation error: " << ex.what() << "\n";
    return kValidation;
  } catch (const IoError& ex) {
    err << "i/o error: " << ex.what() << "\n";
    return kIo;
  } catch (const NetworkError& ex) {
    err << "network error: " << ex.what() << "\n";
    return kIo;
  } catch (const nlohmann::json::exception& ex) {
    err << "validation error: " << ex.what() << "\n";
    return kValidation;
  } catch (const fs::filesystem_error& ex) {
    err << "i/o error: " << ex.what() << "\n";
    return kIo;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kIo;
  }
  return kUsage;
}

}  // namespace sieval::cli
