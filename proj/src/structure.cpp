#include "sieval/structure.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

#include <json.hpp>

#include "sieval/errors.hpp"
#include "sieval/unicode.hpp"

namespace sieval {

using nlohmann::json;

namespace {

bool plain_key(std::string_view key) {
  if (key.empty()) return false;
  return std::none_of(key.begin(), key.end(), [](char c) {
    return c == '.' || c == '[' || c == ']' || c == '\'' || c == '"' ||
           static_cast<unsigned char>(c) <= 0x20;
  });
}

std::string member_path(std::string_view key) {
  if (plain_key(key)) return "$." + std::string(key);
  return "$[" + json(std::string(key)).dump() + "]";
}

std::string type_name(const json& value) {
  return value.type_name();
}

}  // namespace

std::optional<std::string_view> extract_json_span(std::string_view text) {
  std::optional<std::string_view> best;
  std::vector<std::size_t> open;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"' && !open.empty()) {
      in_string = true;
    } else if (c == '{') {
      open.push_back(i);
    } else if (c == '}' && !open.empty()) {
      const std::size_t start = open.back();
      open.pop_back();
      const std::size_t length = i - start + 1;
      if (!best || length > best->size()) best = text.substr(start, length);
    }
  }
  return best;
}

FlatJsonVerdict validate_flat_json(std::string_view text, const FlatJsonOptions& options) {
  FlatJsonVerdict verdict;
  if (options.extract_span) {
    if (auto span = extract_json_span(text)) text = *span;
  }

  std::vector<std::string> duplicate_keys;
  std::unordered_set<std::string> root_keys;
  json::parser_callback_t track_root_keys = [&](int depth, json::parse_event_t event,
                                                json& parsed) {
    if (event == json::parse_event_t::key && depth == 1) {
      const auto& key = parsed.get_ref<const std::string&>();
      if (!root_keys.insert(key).second) duplicate_keys.push_back(key);
    }
    return true;
  };

  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), track_root_keys);
  } catch (const json::exception& e) {
    verdict.level_passed = -1;
    verdict.violations.push_back({"$", "parse", e.what()});
    return verdict;
  }

  verdict.level_passed = 0;
  if (!doc.is_object()) {
    verdict.violations.push_back({"$", "root-object", "root is " + type_name(doc) + ", not an object"});
    return verdict;
  }
  if (!duplicate_keys.empty()) {
    for (const auto& key : duplicate_keys) {
      verdict.violations.push_back({member_path(key), "duplicate-key", "key appears more than once"});
    }
    return verdict;
  }

  verdict.level_passed = 1;
  for (const auto& [key, value] : doc.items()) {
    if (!value.is_array()) {
      verdict.violations.push_back({member_path(key), "value-array", "value is " + type_name(value) + ", not an array"});
    }
  }
  if (!verdict.violations.empty()) return verdict;

  verdict.level_passed = 2;
  for (const auto& [key, value] : doc.items()) {
    for (std::size_t i = 0; i < value.size(); ++i) {
      const json& element = value[i];
      if (element.is_structured()) {
        verdict.violations.push_back({member_path(key) + "[" + std::to_string(i) + "]", "nested-structure",
                                      "element is " + type_name(element) + ", not a scalar"});
      }
    }
  }
  if (!verdict.violations.empty()) return verdict;

  verdict.level_passed = 3;
  return verdict;
}

FlatJsonVerdict validate_ner_output(std::string_view text,
                                    const std::optional<std::set<std::string>>& required_keys,
                                    const FlatJsonOptions& options) {
  FlatJsonVerdict verdict = validate_flat_json(text, options);
  if (!required_keys || verdict.level_passed < 1) return verdict;

  std::string_view body = text;
  if (options.extract_span) {
    if (auto span = extract_json_span(text)) body = *span;
  }
  const json doc = json::parse(body.begin(), body.end());
  for (const auto& key : *required_keys) {
    if (!doc.contains(key)) {
      verdict.violations.push_back({member_path(key), "missing-key", "required key is absent"});
    }
  }
  return verdict;
}

namespace {

bool is_header(std::string_view line) {
  static constexpr std::string_view kOpen = "【";
  static constexpr std::string_view kClose = "】";
  return line.size() >= kOpen.size() + kClose.size() && line.starts_with(kOpen) &&
         line.ends_with(kClose);
}

std::vector<std::string_view> split_on(std::string_view line, std::string_view sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t hit = line.find(sep, start);
    if (hit == std::string_view::npos) {
      parts.push_back(line.substr(start));
      return parts;
    }
    parts.push_back(line.substr(start, hit - start));
    start = hit + sep.size();
  }
}

}  // namespace

TripleSet parse_kge_triples(std::string_view text, std::span<const std::string> separators) {
  if (separators.empty()) throw InvalidArgument("parse_kge_triples: separator list is empty");
  for (const auto& sep : separators) {
    if (sep.empty()) throw InvalidArgument("parse_kge_triples: empty separator");
  }

  TripleSet out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    start = end + 1;
    ++out.total_lines;
    const std::size_t line_number = out.total_lines;
    if (raw.ends_with('\r')) raw.remove_suffix(1);

    const std::string_view line = unicode::trim(raw);
    if (line.empty() || is_header(line)) {
      ++out.skipped_lines;
      continue;
    }
    const auto sep = std::find_if(separators.begin(), separators.end(), [&](const std::string& s) {
      return line.find(s) != std::string_view::npos;
    });
    if (sep == separators.end()) {
      out.malformed_lines.push_back({line_number, std::string(raw), "no-separator", 1});
      continue;
    }
    const auto parts = split_on(line, *sep);
    if (parts.size() != 3) {
      out.malformed_lines.push_back({line_number, std::string(raw), "wrong-arity", parts.size()});
      continue;
    }
    Triple triple{std::string(unicode::trim(parts[0])), std::string(unicode::trim(parts[1])),
                  std::string(unicode::trim(parts[2]))};
    if (triple.subject.empty() || triple.relation.empty() || triple.object.empty()) {
      out.malformed_lines.push_back({line_number, std::string(raw), "empty-component", 3});
      continue;
    }
    out.triples.push_back(std::move(triple));
  }
  return out;
}

TripleSet parse_kge_triples(std::string_view text) {
  static const std::string kDefault[] = {std::string(kFullWidthDash)};
  return parse_kge_triples(text, kDefault);
}

std::string format_triples(std::span<const Triple> triples) {
  std::string out;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    if (i > 0) out.push_back('\n');
    out += triples[i].subject;
    out += kFullWidthDash;
    out += triples[i].relation;
    out += kFullWidthDash;
    out += triples[i].object;
  }
  return out;
}

OverlapScore triple_overlap(std::span<const Triple> predicted, std::span<const Triple> gold) {
  if (predicted.empty() && gold.empty()) return {1.0, 1.0, 1.0};
  if (predicted.empty() || gold.empty()) return {0.0, 0.0, 0.0};
  std::map<Triple, std::size_t> gold_counts;
  for (const auto& t : gold) ++gold_counts[t];
  std::size_t hits = 0;
  for (const auto& t : predicted) {
    auto it = gold_counts.find(t);
    if (it != gold_counts.end() && it->second > 0) {
      --it->second;
      ++hits;
    }
  }
  return make_overlap(static_cast<double>(hits) / static_cast<double>(predicted.size()),
                      static_cast<double>(hits) / static_cast<double>(gold.size()));
}

}  // namespace sieval
