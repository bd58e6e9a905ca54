#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sieval/metrics.hpp"

namespace sieval {

struct Violation {
  std::string path;  // JSONPath-style location, e.g. $.authors[0]
  std::string rule;
  std::string message;

  bool operator==(const Violation&) const = default;
};

// Cumulative structural levels of a flat-list JSON document:
//   -1  text does not parse as a single JSON document
//    0  parses
//    1  root is an object with unique keys
//    2  every root value is an array
//    3  every array element is a scalar (string, number, boolean, null)
struct FlatJsonVerdict {
  int level_passed = -1;
  std::vector<Violation> violations;

  bool parsed() const { return level_passed >= 0; }
};

struct FlatJsonOptions {
  // Parse only the longest balanced {...} span of the text (for outputs that
  // wrap JSON in prose or code fences).
  bool extract_span = false;
};

// Total: every input yields a verdict, nothing is thrown.
FlatJsonVerdict validate_flat_json(std::string_view text, const FlatJsonOptions& options = {});

// Longest balanced {...} span, string-literal aware. Ties go to the earliest.
std::optional<std::string_view> extract_json_span(std::string_view text);

// validate_flat_json plus key coverage: each missing required key appends a
// "missing-key" violation without lowering level_passed.
FlatJsonVerdict validate_ner_output(std::string_view text,
                                    const std::optional<std::set<std::string>>& required_keys,
                                    const FlatJsonOptions& options = {});

inline constexpr std::string_view kFullWidthDash = "\xEF\xBC\x8D";  // U+FF0D
inline constexpr std::string_view kEnDash = "\xE2\x80\x93";         // U+2013

struct Triple {
  std::string subject;
  std::string relation;
  std::string object;

  bool operator==(const Triple&) const = default;
  auto operator<=>(const Triple&) const = default;
};

struct MalformedLine {
  std::size_t line_number;  // 1-based
  std::string raw;
  std::string reason;  // "no-separator" | "wrong-arity" | "empty-component"
  std::size_t arity = 0;

  bool operator==(const MalformedLine&) const = default;
};

// Every input line lands in exactly one of triples, malformed_lines or
// skipped_lines: triples.size() + malformed_lines.size() + skipped_lines == total_lines.
struct TripleSet {
  std::vector<Triple> triples;
  std::vector<MalformedLine> malformed_lines;
  std::size_t skipped_lines = 0;  // blank lines and 【...】 headers
  std::size_t total_lines = 0;

  bool operator==(const TripleSet&) const = default;
};

// Splits each non-blank, non-header line on the first separator from
// `separators` that occurs in it. Exactly three non-empty trimmed parts make a
// triple; anything else is recorded as malformed. Lines are '\n'-separated, a
// trailing '\r' is ignored, and a final newline does not start a new line.
// Throws InvalidArgument when `separators` is empty or holds an empty string.
TripleSet parse_kge_triples(std::string_view text,
                            std::span<const std::string> separators);
TripleSet parse_kge_triples(std::string_view text);  // U+FF0D only

// One triple per line joined with U+FF0D, no trailing newline.
std::string format_triples(std::span<const Triple> triples);

// Clipped multiset overlap of exact-match triples. Diagnostic only.
OverlapScore triple_overlap(std::span<const Triple> predicted, std::span<const Triple> gold);

}  // namespace sieval
