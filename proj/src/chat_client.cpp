#include "sieval/chat_client.hpp"

#include <algorithm>
#include <cstdlib>

#include <httplib.h>

#include "sieval/digest.hpp"
#include "sieval/errors.hpp"

namespace sieval {

std::string_view to_string(GenerationStage stage) {
  switch (stage) {
    case GenerationStage::kContext: return "context";
    case GenerationStage::kSchema: return "schema";
    case GenerationStage::kGold: return "gold";
  }
  return "unknown";
}

nlohmann::ordered_json chat_request_body(const EndpointConfig& endpoint,
                                         const std::vector<ChatMessage>& messages) {
  nlohmann::ordered_json body;
  body["model"] = endpoint.model;
  auto& msgs = body["messages"] = nlohmann::ordered_json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  body["temperature"] = endpoint.temperature;
  return body;
}

std::string parse_chat_response(std::string_view body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw NetworkError(std::string("chat response is not JSON: ") + e.what());
  }
  const auto choices = j.find("choices");
  if (choices == j.end() || !choices->is_array() || choices->empty()) {
    throw NetworkError("chat response has no choices");
  }
  const auto& first = (*choices)[0];
  if (!first.contains("message") || !first["message"].contains("content") ||
      !first["message"]["content"].is_string()) {
    throw NetworkError("chat response choice has no message content");
  }
  return first["message"]["content"].get<std::string>();
}

HttpChatClient::HttpChatClient(EndpointConfig endpoint) : endpoint_(std::move(endpoint)) {
  const std::string& url = endpoint_.base_url;
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw InvalidArgument("base URL needs a scheme: " + url);
  const std::size_t path_start = url.find('/', scheme_end + 3);
  origin_ = url.substr(0, path_start);
  path_base_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (path_base_.ends_with('/')) path_base_.pop_back();
  if (const char* key = std::getenv(endpoint_.api_key_env.c_str())) api_key_ = key;
}

std::string HttpChatClient::complete(const ChatRequest& request) {
  httplib::Client client(origin_);
  const auto timeout = std::chrono::duration_cast<std::chrono::seconds>(endpoint_.timeout).count();
  client.set_connection_timeout(timeout, 0);
  client.set_read_timeout(timeout, 0);
  client.set_write_timeout(timeout, 0);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  const std::string body = chat_request_body(endpoint_, request.messages).dump();
  auto res = client.Post(path_base_ + "/chat/completions", headers, body, "application/json");
  if (!res) {
    throw NetworkError("chat request to " + origin_ + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 401 || res->status == 403) {
    throw NetworkError("chat endpoint rejected credentials (HTTP " + std::to_string(res->status) +
                       "); set " + endpoint_.api_key_env);
  }
  if (res->status != 200) {
    throw NetworkError("chat endpoint returned HTTP " + std::to_string(res->status));
  }
  return parse_chat_response(res->body);
}

namespace {

std::vector<std::string> gold_list(const nlohmann::json& j) {
  if (j.is_string()) return {j.get<std::string>()};
  if (j.is_array() && !j.empty() &&
      std::all_of(j.begin(), j.end(), [](const nlohmann::json& x) { return x.is_string(); })) {
    return j.get<std::vector<std::string>>();
  }
  throw ValidationError("fixture gold_output must be a string or a non-empty array of strings");
}

}  // namespace

FixtureChatClient::FixtureChatClient(const std::filesystem::path& fixture_dir) {
  if (!std::filesystem::is_directory(fixture_dir)) {
    throw IoError("fixture directory not found: " + fixture_dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(fixture_dir)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".json" || ext == ".jsonl")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  const auto add = [&](const nlohmann::json& j, const std::string& where) {
    try {
      const Task task = parse_task(j.at("task").get<std::string>());
      std::string topic = j.at("topic").get<std::string>();
      Fixture f{j.at("context").get<std::string>(), j.value("schema", nlohmann::json::array()),
                gold_list(j.at("gold_output"))};
      auto key = std::make_pair(task, topic);
      if (!fixtures_.emplace(key, std::move(f)).second) {
        throw ValidationError("duplicate fixture for " + std::string(to_string(task)) + "/" + topic);
      }
      order_.push_back(std::move(key));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    } catch (const InvalidArgument& e) {
      throw ValidationError(where + ": " + e.what());
    }
  };

  for (const auto& file : files) {
    const std::string content = read_file(file);
    if (file.extension() == ".json") {
      try {
        add(nlohmann::json::parse(content), file.string());
      } catch (const nlohmann::json::exception& e) {
        throw ValidationError(file.string() + ": " + e.what());
      }
      continue;
    }
    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start < content.size()) {
      std::size_t end = content.find('\n', start);
      if (end == std::string::npos) end = content.size();
      const std::string line = content.substr(start, end - start);
      start = end + 1;
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const std::string where = file.string() + ":" + std::to_string(line_no);
      try {
        add(nlohmann::json::parse(line), where);
      } catch (const nlohmann::json::exception& e) {
        throw ValidationError(where + ": " + e.what());
      }
    }
  }
}

std::vector<std::string> FixtureChatClient::topics(Task task) const {
  std::vector<std::string> out;
  for (const auto& [t, topic] : order_) {
    if (t == task) out.push_back(topic);
  }
  return out;
}

std::string FixtureChatClient::complete(const ChatRequest& request) {
  auto it = fixtures_.find({request.task, request.topic});
  if (it == fixtures_.end()) {
    throw NetworkError("no fixture for " + std::string(to_string(request.task)) + " topic '" +
                       request.topic + "'");
  }
  const Fixture& f = it->second;
  switch (request.stage) {
    case GenerationStage::kContext:
      return f.context;
    case GenerationStage::kSchema:
      return f.schema.dump();
    case GenerationStage::kGold: {
      const auto idx = std::min<std::size_t>(static_cast<std::size_t>(std::max(request.attempt, 0)),
                                             f.gold_outputs.size() - 1);
      return f.gold_outputs[idx];
    }
  }
  throw NetworkError("unknown generation stage");
}

}  // namespace sieval
