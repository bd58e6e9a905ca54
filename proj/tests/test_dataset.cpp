#include <doctest.h>

#include <httplib.h>

#include <algorithm>
#include <cstdlib>
#include <set>
#include <thread>

#include <json.hpp>

#include "sieval/chat_client.hpp"
#include "sieval/digest.hpp"
#include "sieval/errors.hpp"
#include "sieval/generate.hpp"
#include "sieval/sample.hpp"
#include "sieval/splits.hpp"
#include "sieval/templates.hpp"
#include "sieval/trainer_config.hpp"
#include "support.hpp"

using namespace sieval;
using sieval::testing::TempDir;

namespace {

Sample make_sample(Task task, int i) {
  Sample s;
  s.task = task;
  s.topic = "topic-" + std::to_string(i);
  s.context = "第" + std::to_string(i) + "篇文章，主題是" + std::string(to_string(task)) + "。";
  switch (task) {
    case Task::kJsonExtract:
      s.schema = {{"人名", ""}, {"地點", "城市"}};
      s.instruction = instruction_template(task, {Language::kZh, s.schema, std::nullopt});
      s.gold_output = R"({"人名": ["王)" + std::to_string(i) + R"("], "地點": []})";
      break;
    case Task::kKge:
      s.instruction = instruction_template(task, {});
      s.gold_output = "甲" + std::to_string(i) + "－是－乙\n丙－有－丁";
      break;
    case Task::kNer:
      s.instruction = instruction_template(task, {});
      s.gold_output = R"({"人名": ["林)" + std::to_string(i) + R"("]})";
      break;
  }
  s.id = sample_id(task, s.topic, s.context);
  return s;
}

std::vector<Sample> make_pool(int per_task, int kge_count = -1) {
  std::vector<Sample> out;
  for (Task task : kAllTasks) {
    const int n = task == Task::kKge && kge_count >= 0 ? kge_count : per_task;
    for (int i = 0; i < n; ++i) out.push_back(make_sample(task, i));
  }
  return out;
}

}  // namespace

TEST_CASE("kge template reproduces the reference instruction") {
  const std::string t = instruction_template(Task::kKge, {});
  CHECK(t.starts_with("請幫我為下面文章建構知識圖譜"));
  std::string flat = t;
  std::erase(flat, '\n');
  CHECK(flat ==
        "請幫我為下面文章建構知識圖譜。請以這種方式輸出：「【一、三元組格式（主詞－關係－受詞）】"
        "植物基飲食－可以降低－心臟病風險植物基飲食－可以降低－糖尿病風險植物基飲食－可以降低－癌症風險"
        "植物基飲食－有助於攝取－纖維素植物基飲食－有助於攝取－抗氧化物質健康生活－包含－飲食"
        "健康生活－包含－運動健康生活－包含－心理健康運動－能夠幫助－控制體重運動－能夠幫助－增加肌肉健康"
        "運動－能夠幫助－增加骨骼健康運動－能夠釋放－內啡肽運動－有助於改善－心理健康冥想－能夠幫助－減少壓力"
        "深呼吸－有助於－壓力減緩親近自然－能夠提升－生活品質」");
  const std::string rendered = render_instruction(Task::kKge, {Language::kZh, {}, "一篇文章"});
  CHECK(rendered == t + "\n一篇文章");
}

TEST_CASE("ner template is verbatim with the context appended") {
  CHECK(instruction_template(Task::kNer, {}) ==
        "請為下文執行 NER 任務。請輸出成 JSON 且 value 必須為 list 格式，而其中不得再有巢狀結構。");
  const std::string r = render_instruction(Task::kNer, {Language::kZh, {}, "內文"});
  CHECK(r.find("value 必須為 list 格式") != std::string::npos);
  CHECK(r.ends_with("\n內文"));
  CHECK_THROWS_AS(render_instruction(Task::kNer, {}), InvalidArgument);
  CHECK(instruction_template(Task::kNer, {Language::kEn, {}, {}}).starts_with("Please perform"));
}

TEST_CASE("json-extract template names every field and the flat-list constraint") {
  const std::string t =
      instruction_template(Task::kJsonExtract, {Language::kZh, {{"authors", "作者"}, {"year", ""}}, std::nullopt});
  CHECK(t.find("authors") != std::string::npos);
  CHECK(t.find("year") != std::string::npos);
  CHECK(t.find("巢狀結構") != std::string::npos);
  CHECK(t.find("list") != std::string::npos);
  CHECK_THROWS_AS(instruction_template(Task::kJsonExtract, {}), InvalidArgument);
  CHECK(render_instruction(Task::kJsonExtract, {Language::kZh, {{"a", ""}}, std::nullopt}) ==
        instruction_template(Task::kJsonExtract, {Language::kZh, {{"a", ""}}, std::nullopt}));
}

TEST_CASE("gold validation") {
  Sample ner = make_sample(Task::kNer, 1);
  ner.gold_output = R"({"PERSON":["x"]})";
  CHECK(validate_gold(ner).passed);
  ner.gold_output = R"({"PERSON":[["x"]]})";
  CHECK(!validate_gold(ner).passed);
  ner = make_sample(Task::kNer, 1);
  ner.instruction = "請輸出 JSON";
  CHECK(!validate_gold(ner).passed);

  Sample json = make_sample(Task::kJsonExtract, 2);
  CHECK(validate_gold(json).passed);
  json.gold_output = R"({"人名": ["王"]})";
  const auto v = validate_gold(json);
  CHECK(!v.passed);
  REQUIRE(!v.violations.empty());
  CHECK(v.violations.front().rule == "missing-key");

  Sample kge = make_sample(Task::kKge, 3);
  kge.gold_output = kge_exemplar_block();
  const auto k = validate_gold(kge);
  CHECK(k.passed);
  CHECK(k.triple_count == 16);
  kge.gold_output = "甲－乙";
  CHECK(!validate_gold(kge).passed);
}

TEST_CASE("samples round-trip through jsonl") {
  const auto pool = make_pool(2);
  TempDir dir;
  write_file(dir / "s.jsonl", samples_to_jsonl(pool));
  CHECK(load_samples(dir / "s.jsonl") == pool);
}

TEST_CASE("split arithmetic at every dataset scale") {
  const auto pool = make_pool(1000);
  for (int scale : {100, 300, 500, 1000}) {
    CAPTURE(scale);
    const auto m = assemble_splits(pool, scale, 0.9, 7);
    CHECK(m.combined_size() == static_cast<std::size_t>(3 * scale));
    for (const auto& t : m.tasks) {
      CHECK(t.train_ids.size() == static_cast<std::size_t>(std::llround(scale * 0.9)));
      CHECK(t.train_ids.size() + t.validation_ids.size() == static_cast<std::size_t>(scale));
      CHECK(t.held_out_ids.size() == static_cast<std::size_t>(1000 - scale));
      std::set<std::string> all(t.train_ids.begin(), t.train_ids.end());
      all.insert(t.validation_ids.begin(), t.validation_ids.end());
      all.insert(t.held_out_ids.begin(), t.held_out_ids.end());
      CHECK(all.size() == 1000);  // disjoint and covering
    }
  }
  const auto m = assemble_splits(pool, 100, 0.9, 7);
  CHECK(m.train.size() == 270);
  CHECK(m.validation.size() == 30);
}

TEST_CASE("splits are deterministic under the seed") {
  const auto pool = make_pool(150);
  const auto a = assemble_splits(pool, 100, 0.9, 7);
  const auto b = assemble_splits(pool, 100, 0.9, 7);
  CHECK(a.train == b.train);
  CHECK(a.validation == b.validation);
  auto shuffled = pool;
  std::reverse(shuffled.begin(), shuffled.end());
  CHECK(assemble_splits(shuffled, 100, 0.9, 7).train == a.train);
  CHECK(assemble_splits(pool, 100, 0.9, 8).train != a.train);
}

TEST_CASE("shortfall names the task") {
  const auto pool = make_pool(1000, 800);
  try {
    assemble_splits(pool, 1000, 0.9, 1);
    FAIL("expected a shortfall");
  } catch (const ShortfallError& e) {
    CHECK(e.task == Task::kKge);
    CHECK(std::string(e.what()).find("kge") != std::string::npos);
  }
  CHECK_THROWS_AS(assemble_splits(pool, 100, 1.0, 1), InvalidArgument);
  CHECK_THROWS_AS(assemble_splits(pool, 0, 0.9, 1), InvalidArgument);
}

TEST_CASE("invalid and duplicate-context samples are not eligible") {
  auto pool = make_pool(12);
  Sample bad = make_sample(Task::kNer, 100);
  bad.gold_output = "not json";
  pool.push_back(bad);
  Sample dup = make_sample(Task::kNer, 0);
  dup.topic = "other";
  dup.id = "ner-duplicate";
  pool.push_back(dup);
  const auto m = assemble_splits(pool, 12, 0.5, 3);
  const auto& ner = m.tasks[2];
  CHECK(ner.invalid == 1);
  CHECK(ner.duplicates == 1);
  CHECK(ner.held_out_ids.empty());
  CHECK_THROWS_AS(assemble_splits(pool, 13, 0.5, 3), ShortfallError);
}

TEST_CASE("training files hold instruction, input and output") {
  const std::vector<Sample> one{make_sample(Task::kNer, 5)};
  const auto j = nlohmann::ordered_json::parse(training_file_content(one));
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 1);
  CHECK(j[0].size() == 3);
  CHECK(j[0]["instruction"] == one[0].instruction);
  CHECK(j[0]["input"] == one[0].context);
  CHECK(j[0]["output"] == one[0].gold_output);
  CHECK(j.begin().value().begin().key() == "instruction");
}

TEST_CASE("emission is byte-identical on re-run") {
  const auto pool = make_pool(120);
  TempDir a, b;
  auto ma = assemble_splits(pool, 100, 0.9, 7);
  auto mb = assemble_splits(pool, 100, 0.9, 7);
  emit_training_files(ma, a.path());
  emit_training_files(mb, b.path());
  CHECK(read_file(a / "train.json") == read_file(b / "train.json"));
  CHECK(read_file(a / "validation.json") == read_file(b / "validation.json"));
  CHECK(ma.file_digests == mb.file_digests);
  CHECK(ma.file_digests.at("train.json") == sha256_file(a / "train.json"));
  CHECK(nlohmann::json::parse(read_file(a / "train.json")).size() +
            nlohmann::json::parse(read_file(a / "validation.json")).size() ==
        300);
  CHECK(manifest_to_json(ma)["combined_count"] == 300);
}

TEST_CASE("trainer config defaults match the golden file") {
  CHECK(render_trainer_config({}) == read_file(std::filesystem::path(SIEVAL_GOLDEN_DIR) / "trainer_config.yaml"));
}

TEST_CASE("trainer config overrides, validation and round trip") {
  TrainerConfig cfg;
  cfg.epochs = 10;
  const std::string text = render_trainer_config(cfg);
  CHECK(text.find("num_train_epochs: 10.0\n") != std::string::npos);
  CHECK(text.find("lora_rank: 32\n") != std::string::npos);
  CHECK(parse_trainer_config(text) == cfg);
  CHECK(parse_trainer_config(render_trainer_config({})) == TrainerConfig{});
  cfg.lora_dropout = 1.5;
  CHECK_THROWS_AS(validate(cfg), ValidationError);
  TempDir dir;
  CHECK_THROWS_AS(emit_trainer_config(cfg, dir / "t.yaml"), ValidationError);
  CHECK(!std::filesystem::exists(dir / "t.yaml"));
}

TEST_CASE("token estimate and truncation") {
  CHECK(estimate_tokens("中文字") == doctest::Approx(3.0));
  CHECK(estimate_tokens("two words") == doctest::Approx(2.6));
  std::string text;
  for (int i = 0; i < 400; ++i) text += "這是一個句子。";
  const std::string cut = truncate_to_token_cap(text, 1500);
  CHECK(estimate_tokens(cut) <= 1500.0);
  CHECK(cut.ends_with("。"));
  CHECK(text.starts_with(cut));
  CHECK(truncate_to_token_cap("短文。", 1500) == "短文。");
}

TEST_CASE("offline generation from fixtures") {
  FixtureChatClient client(sieval::testing::fixture("forge"));
  for (Task task : kAllTasks) {
    const auto topics = client.topics(task);
    REQUIRE(topics.size() == 3);
    const auto r = generate_samples(client, topics, task, 3);
    CHECK(r.samples.size() == 3);
    CHECK(r.shortfall() == 0);
    for (const auto& s : r.samples) CHECK(validate_gold(s).passed);
  }
  const auto ner_topics = client.topics(Task::kNer);
  GenerationOptions no_retry;
  no_retry.max_retries = 0;
  const auto strict = generate_samples(client, ner_topics, Task::kNer, 3, no_retry);
  CHECK(strict.samples.size() == 2);
  CHECK(strict.shortfall() == 1);
  REQUIRE(strict.dropped.size() == 1);
  CHECK(strict.dropped[0].topic == ner_topics[0]);
  CHECK(!strict.dropped[0].network);
  CHECK(generate_samples(client, ner_topics, Task::kNer, 0).samples.empty());
  const auto extra = generate_samples(client, ner_topics, Task::kNer, 5);
  CHECK(extra.samples.size() == 3);
  CHECK(extra.shortfall() == 2);
}

TEST_CASE("generation is independent of the in-flight cap") {
  FixtureChatClient client(sieval::testing::fixture("forge"));
  const auto topics = client.topics(Task::kJsonExtract);
  GenerationOptions serial, parallel;
  serial.in_flight = 1;
  parallel.in_flight = 8;
  CHECK(generate_samples(client, topics, Task::kJsonExtract, 3, serial).samples ==
        generate_samples(client, topics, Task::kJsonExtract, 3, parallel).samples);
}

TEST_CASE("http client speaks the chat-completions shape") {
  httplib::Server server;
  nlohmann::json seen;
  std::string auth;
  std::string path;
  server.Post(R"(/v1/chat/completions)", [&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    auth = req.get_header_value("Authorization");
    path = req.path;
    res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"你好"}}]})", "application/json");
  });
  server.Post(R"(/denied/chat/completions)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 401;
    res.set_content(R"({"error":{"message":"bad key"}})", "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  ::setenv("SIEVAL_TEST_KEY", "sk-test", 1);
  EndpointConfig endpoint;
  endpoint.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1/";
  endpoint.model = "gpt-4o-mini";
  endpoint.api_key_env = "SIEVAL_TEST_KEY";
  endpoint.timeout = std::chrono::seconds(5);
  HttpChatClient client(endpoint);
  ChatRequest req{{{"system", "s"}, {"user", "u"}}, Task::kNer, "t", GenerationStage::kContext, 0};
  CHECK(client.complete(req) == "你好");
  CHECK(path == "/v1/chat/completions");
  CHECK(auth == "Bearer sk-test");
  CHECK(seen["model"] == "gpt-4o-mini");
  REQUIRE(seen["messages"].size() == 2);
  CHECK(seen["messages"][1]["content"] == "u");

  endpoint.base_url = "http://127.0.0.1:" + std::to_string(port) + "/denied";
  HttpChatClient denied(endpoint);
  CHECK_THROWS_AS(denied.complete(req), NetworkError);

  server.stop();
  thread.join();
  endpoint.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  HttpChatClient gone(endpoint);
  CHECK_THROWS_AS(gone.complete(req), NetworkError);
}

TEST_CASE("chat response parsing") {
  CHECK(parse_chat_response(R"({"choices":[{"message":{"content":"x"}}]})") == "x");
  CHECK_THROWS(parse_chat_response(R"({"choices":[]})"));
  CHECK_THROWS(parse_chat_response("not json"));
}
