#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sieval/task.hpp"

namespace sieval {

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

enum class GenerationStage { kContext, kSchema, kGold };
std::string_view to_string(GenerationStage stage);

// One completion request. The metadata fields let offline clients answer
// without interpreting the prompt; HTTP clients send only the messages.
struct ChatRequest {
  std::vector<ChatMessage> messages;
  Task task = Task::kJsonExtract;
  std::string topic;
  GenerationStage stage = GenerationStage::kContext;
  int attempt = 0;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  // Returns the assistant message text. Throws NetworkError on transport,
  // authentication or response-shape failures. Must be safe to call from
  // several threads at once.
  virtual std::string complete(const ChatRequest& request) = 0;
};

struct EndpointConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4o-mini";
  std::string api_key_env = "OPENAI_API_KEY";
  std::chrono::seconds timeout{120};
  double temperature = 0.7;
};

// Request body in the chat-completions shape:
// {"model": ..., "messages": [{"role", "content"}...], "temperature": ...}
nlohmann::ordered_json chat_request_body(const EndpointConfig& endpoint,
                                         const std::vector<ChatMessage>& messages);
// Extracts choices[0].message.content. Throws NetworkError on any other shape.
std::string parse_chat_response(std::string_view body);

// POSTs to <base_url>/chat/completions with a bearer token read from the
// environment variable named by api_key_env.
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(EndpointConfig endpoint);
  std::string complete(const ChatRequest& request) override;

 private:
  EndpointConfig endpoint_;
  std::string origin_;     // scheme://host[:port]
  std::string path_base_;  // path prefix, without trailing slash
  std::string api_key_;
};

// Offline replay. A fixture directory holds *.json files (one fixture
// object each) and/or *.jsonl files (one per line), read in file-name order:
//   {"task": "kge", "topic": "...", "context": "...",
//    "schema": ["field", {"name": "...", "description": "..."}],  // json-extract
//    "gold_output": "..." | ["attempt 0", "attempt 1", ...]}
// Gold requests with attempt k get entry min(k, last) of a gold_output array.
class FixtureChatClient : public ChatClient {
 public:
  explicit FixtureChatClient(const std::filesystem::path& fixture_dir);
  std::string complete(const ChatRequest& request) override;

  std::vector<std::string> topics(Task task) const;
  std::size_t size() const { return fixtures_.size(); }

 private:
  struct Fixture {
    std::string context;
    nlohmann::json schema;
    std::vector<std::string> gold_outputs;
  };
  std::map<std::pair<Task, std::string>, Fixture> fixtures_;
  std::vector<std::pair<Task, std::string>> order_;
};

}  // namespace sieval
