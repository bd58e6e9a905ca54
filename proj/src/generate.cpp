#include "sieval/generate.hpp"

#include <algorithm>
#include <atomic>
#include <optional>
#include <thread>

#include "sieval/digest.hpp"
#include "sieval/errors.hpp"
#include "sieval/unicode.hpp"

namespace sieval {

namespace {

bool is_sentence_end(char32_t cp) {
  return cp == U'。' || cp == U'！' || cp == U'？' || cp == U'!' || cp == U'?' || cp == U'.' ||
         cp == U'\n';
}

}  // namespace

double estimate_tokens(std::string_view text) {
  std::size_t cjk = 0;
  std::size_t words = 0;
  bool in_word = false;
  for (std::size_t pos = 0; pos < text.size();) {
    const auto c = unicode::decode_at(text, pos);
    pos += c.length;
    if (unicode::is_cjk(c.codepoint)) {
      ++cjk;
      in_word = false;
    } else if (unicode::is_word_char(c.codepoint)) {
      if (!in_word) ++words;
      in_word = true;
    } else {
      in_word = false;
    }
  }
  return static_cast<double>(cjk) + 1.3 * static_cast<double>(words);
}

std::string truncate_to_token_cap(std::string_view text, std::size_t cap) {
  const double limit = static_cast<double>(cap);
  if (estimate_tokens(text) <= limit) return std::string(text);
  std::size_t best_boundary = 0;
  std::size_t hard_cut = 0;
  std::size_t cjk = 0;
  std::size_t words = 0;
  bool in_word = false;
  for (std::size_t pos = 0; pos < text.size();) {
    const auto c = unicode::decode_at(text, pos);
    const std::size_t next = pos + c.length;
    if (unicode::is_cjk(c.codepoint)) {
      ++cjk;
      in_word = false;
    } else if (unicode::is_word_char(c.codepoint)) {
      if (!in_word) ++words;
      in_word = true;
    } else {
      in_word = false;
    }
    if (static_cast<double>(cjk) + 1.3 * static_cast<double>(words) > limit) break;
    hard_cut = next;
    if (is_sentence_end(c.codepoint)) best_boundary = next;
    pos = next;
  }
  const std::size_t cut = best_boundary > 0 ? best_boundary : hard_cut;
  return std::string(unicode::trim(text.substr(0, cut)));
}

std::string sample_id(Task task, std::string_view topic, std::string_view context) {
  std::string key(to_string(task));
  key += '|';
  key += topic;
  key += '|';
  key += context;
  return std::string(to_string(task)) + "-" + sha256_hex(key).substr(0, 12);
}

namespace {

const char* system_prompt(Language language) {
  return language == Language::kZh ? "你是一位嚴謹的資料標註員，只輸出被要求的內容。"
                                   : "You are a careful data annotator. Output only what is requested.";
}

std::string context_prompt(std::string_view topic, const GenerationOptions& options) {
  const std::string cap = std::to_string(options.max_context_tokens);
  if (options.language == Language::kZh) {
    return "請撰寫一篇關於「" + std::string(topic) + "」的長篇知識性文章，內容語意密集、資訊豐富，長度不超過約 " +
           cap + " tokens。只輸出文章本身。";
  }
  return "Write a long, semantically dense knowledge article about \"" + std::string(topic) +
         "\" of at most about " + cap + " tokens. Output only the article.";
}

std::string schema_prompt(std::string_view context, Language language) {
  std::string p = language == Language::kZh
                      ? "閱讀下文，決定一組值得擷取的欄位。以 JSON 陣列輸出，每個元素為 {\"name\": 欄位名稱, "
                        "\"description\": 說明}，只輸出 JSON。\n"
                      : "Read the text below and choose a set of fields worth extracting. Output a JSON "
                        "array whose elements are {\"name\": field name, \"description\": explanation}; "
                        "output only JSON.\n";
  p += context;
  return p;
}

std::vector<SchemaField> parse_schema_reply(const std::string& reply) {
  const nlohmann::json j = nlohmann::json::parse(reply);
  if (!j.is_array() || j.empty()) throw ValidationError("schema reply is not a non-empty array");
  std::vector<SchemaField> fields;
  for (const auto& f : j) {
    if (f.is_string()) {
      fields.push_back({f.get<std::string>(), ""});
    } else if (f.is_object() && f.contains("name") && f["name"].is_string()) {
      fields.push_back({f["name"].get<std::string>(), f.value("description", std::string())});
    } else {
      throw ValidationError("schema reply entries must be names or {name, description} objects");
    }
    if (fields.back().name.empty()) throw ValidationError("schema reply has an empty field name");
  }
  return fields;
}

struct Outcome {
  std::optional<Sample> sample;
  DroppedTopic dropped;
};

// Runs `step` up to 1 + max_retries times. Returns the value or nullopt with
// the last failure recorded in `dropped`.
template <typename Step>
auto with_retries(int max_retries, DroppedTopic& dropped, std::string_view stage, Step step)
    -> std::optional<decltype(step(0))> {
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    try {
      return step(attempt);
    } catch (const NetworkError& e) {
      dropped.reason = std::string(stage) + ": " + e.what();
      dropped.network = true;
    } catch (const std::exception& e) {
      dropped.reason = std::string(stage) + ": " + e.what();
      dropped.network = false;
    }
  }
  return std::nullopt;
}

Outcome generate_one(ChatClient& client, const std::string& topic, Task task,
                     const GenerationOptions& options) {
  Outcome out;
  out.dropped.topic = topic;
  const ChatMessage system{"system", system_prompt(options.language)};
  const int retries = std::max(options.max_retries, 0);

  auto context = with_retries(retries, out.dropped, "context", [&](int attempt) {
    ChatRequest req{{system, {"user", context_prompt(topic, options)}}, task, topic,
                    GenerationStage::kContext, attempt};
    std::string text = truncate_to_token_cap(client.complete(req), options.max_context_tokens);
    if (unicode::trim(text).empty()) throw ValidationError("empty article");
    return text;
  });
  if (!context) return out;

  std::vector<SchemaField> schema;
  if (task == Task::kJsonExtract) {
    auto fields = with_retries(retries, out.dropped, "schema", [&](int attempt) {
      ChatRequest req{{system, {"user", schema_prompt(*context, options.language)}}, task, topic,
                      GenerationStage::kSchema, attempt};
      return parse_schema_reply(client.complete(req));
    });
    if (!fields) return out;
    schema = std::move(*fields);
  }

  InstructionParams params{options.language, schema, *context};
  const std::string instruction = instruction_template(task, params);
  const std::string prompt = render_instruction(task, params);
  auto sample = with_retries(retries, out.dropped, "gold", [&](int attempt) {
    ChatRequest req{{system, {"user", prompt}}, task, topic, GenerationStage::kGold, attempt};
    Sample s;
    s.task = task;
    s.topic = topic;
    s.context = *context;
    s.instruction = instruction;
    s.schema = schema;
    s.gold_output = std::string(unicode::trim(client.complete(req)));
    s.id = sample_id(task, topic, s.context);
    const GoldVerdict verdict = validate_gold(s);
    if (!verdict.passed) {
      const Violation& v = verdict.violations.front();
      throw ValidationError("gold output invalid (" + v.rule + " at " + v.path + ": " + v.message + ")");
    }
    return s;
  });
  if (sample) out.sample = std::move(*sample);
  return out;
}

}  // namespace

GenerationResult generate_samples(ChatClient& client, std::span<const std::string> topics, Task task,
                                  std::size_t count, const GenerationOptions& options) {
  GenerationResult result;
  result.requested = count;
  const std::size_t n = std::min(count, topics.size());
  std::vector<Outcome> outcomes(n);

  const std::size_t workers = std::clamp<std::size_t>(options.in_flight, 1, std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) outcomes[i] = generate_one(client, topics[i], task, options);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  for (auto& o : outcomes) {
    if (o.sample) {
      result.samples.push_back(std::move(*o.sample));
    } else {
      result.dropped.push_back(std::move(o.dropped));
    }
  }
  for (std::size_t i = n; i < count; ++i) {
    result.dropped.push_back({"", "no topic left for sample " + std::to_string(i + 1), false});
  }
  return result;
}

}  // namespace sieval
