#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sieval/chat_client.hpp"
#include "sieval/sample.hpp"

namespace sieval {

inline constexpr std::size_t kContextTokenCap = 1500;

// Approximate token count: one per CJK codepoint, 1.3 per word run.
double estimate_tokens(std::string_view text);

// Longest prefix ending at a sentence boundary (。！？!?. or newline) whose
// estimate stays within `cap`; hard cut at the cap when no boundary fits.
std::string truncate_to_token_cap(std::string_view text, std::size_t cap);

struct GenerationOptions {
  Language language = Language::kZh;
  int max_retries = 2;  // extra attempts per stage after the first
  std::size_t max_context_tokens = kContextTokenCap;
  std::size_t in_flight = 4;  // concurrent topics
};

struct DroppedTopic {
  std::string topic;
  std::string reason;
  bool network = false;  // dropped because the endpoint kept failing
};

struct GenerationResult {
  std::vector<Sample> samples;  // every one passes validate_gold
  std::vector<DroppedTopic> dropped;
  std::size_t requested = 0;

  std::size_t shortfall() const { return requested - samples.size(); }
};

// For each of the first `count` topics: requests an article, then (for
// json-extract) a field list, then the gold output for the rendered
// instruction. A failing stage is retried up to max_retries times, after which
// the topic is dropped with its reason. Output order follows topic order
// regardless of in_flight. Topics beyond the list are reported as shortfall.
GenerationResult generate_samples(ChatClient& client, std::span<const std::string> topics, Task task,
                                  std::size_t count, const GenerationOptions& options = {});

// Stable sample id: "<task>-<first 12 hex of sha256(task|topic|context)>".
std::string sample_id(Task task, std::string_view topic, std::string_view context);

}  // namespace sieval
