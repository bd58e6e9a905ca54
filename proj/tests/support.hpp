#pragma once

#include <cstdlib>
#include <filesystem>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sieval/cli.hpp"
#include "sieval/digest.hpp"

namespace sieval::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(SIEVAL_FIXTURE_DIR) / name;
}

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "sieval-XXXXXX").string();
    if (::mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  std::string str(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

inline CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run_command(args, out, err);
  return {code, out.str(), err.str()};
}

// One jsonl fixture file per task with `per_task` valid topics each, for
// `forge generate --offline`.
inline void write_synthetic_fixtures(const std::filesystem::path& dir, int per_task) {
  std::filesystem::create_directories(dir);
  std::string json, kge, ner;
  for (int i = 0; i < per_task; ++i) {
    const std::string n = std::to_string(i);
    const std::string context = "第" + n + "號文章：研究員甲" + n + "在台北研究植物基飲食，發現飲食" + n + "可以降低心臟病風險。";
    json += nlohmann::json{{"task", "json-extract"}, {"topic", "主題" + n}, {"context", context + "抽取"},
                           {"schema", {"人名", "地點"}},
                           {"gold_output", nlohmann::json{{"人名", {"甲" + n}}, {"地點", {"台北"}}}.dump()}}
                .dump() + "\n";
    kge += nlohmann::json{{"task", "kge"}, {"topic", "主題" + n}, {"context", context + "圖譜"},
                          {"gold_output", "甲" + n + "－研究－植物基飲食\n飲食" + n + "－可以降低－心臟病風險"}}
               .dump() + "\n";
    ner += nlohmann::json{{"task", "ner"}, {"topic", "主題" + n}, {"context", context + "實體"},
                          {"gold_output", nlohmann::json{{"人名", {"甲" + n}}, {"地點", {"台北"}}}.dump()}}
               .dump() + "\n";
  }
  write_file(dir / "json-extract.jsonl", json);
  write_file(dir / "kge.jsonl", kge);
  write_file(dir / "ner.jsonl", ner);
}

}  // namespace sieval::testing
