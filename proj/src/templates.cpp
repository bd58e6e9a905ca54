#include "sieval/templates.hpp"

#include <array>

#include <json.hpp>

#include "sieval/errors.hpp"

namespace sieval {

std::string_view to_string(Language language) { return language == Language::kZh ? "zh" : "en"; }

Language parse_language(std::string_view tag) {
  if (tag == "zh") return Language::kZh;
  if (tag == "en") return Language::kEn;
  throw InvalidArgument("unknown language '" + std::string(tag) + "' (expected zh or en)");
}

namespace {

const std::array<Triple, 16> kExemplarZh = {{
    {"植物基飲食", "可以降低", "心臟病風險"},
    {"植物基飲食", "可以降低", "糖尿病風險"},
    {"植物基飲食", "可以降低", "癌症風險"},
    {"植物基飲食", "有助於攝取", "纖維素"},
    {"植物基飲食", "有助於攝取", "抗氧化物質"},
    {"健康生活", "包含", "飲食"},
    {"健康生活", "包含", "運動"},
    {"健康生活", "包含", "心理健康"},
    {"運動", "能夠幫助", "控制體重"},
    {"運動", "能夠幫助", "增加肌肉健康"},
    {"運動", "能夠幫助", "增加骨骼健康"},
    {"運動", "能夠釋放", "內啡肽"},
    {"運動", "有助於改善", "心理健康"},
    {"冥想", "能夠幫助", "減少壓力"},
    {"深呼吸", "有助於", "壓力減緩"},
    {"親近自然", "能夠提升", "生活品質"},
}};

const std::array<Triple, 16> kExemplarEn = {{
    {"Plant-based diet", "can reduce", "risk of heart disease"},
    {"Plant-based diet", "can reduce", "risk of diabetes"},
    {"Plant-based diet", "can reduce", "risk of cancer"},
    {"Plant-based diet", "helps intake", "dietary fiber"},
    {"Plant-based diet", "helps intake", "antioxidants"},
    {"Healthy lifestyle", "includes", "diet"},
    {"Healthy lifestyle", "includes", "exercise"},
    {"Healthy lifestyle", "includes", "mental health"},
    {"Exercise", "can help", "control weight"},
    {"Exercise", "can help", "increase muscle"},
    {"Exercise", "can help", "improve bone health"},
    {"Exercise", "can release", "endorphins"},
    {"Exercise", "can improve", "mental health"},
    {"Meditation", "can help", "reduce stress"},
    {"Deep breathing", "helps", "stress relief"},
    {"Being close to nature", "can improve", "quality of life"},
}};

std::string json_schema_instruction(const InstructionParams& params) {
  if (params.schema.empty()) {
    throw InvalidArgument("json-extract instruction needs a non-empty schema (field list)");
  }
  nlohmann::ordered_json shape = nlohmann::ordered_json::object();
  for (const auto& field : params.schema) {
    if (field.name.empty()) throw InvalidArgument("json-extract schema field with empty name");
    shape[field.name] = nlohmann::ordered_json::array({"..."});
  }
  const bool zh = params.language == Language::kZh;
  std::string text = zh ? "請根據下文擷取以下資訊，並輸出成 JSON。\n欄位：\n"
                        : "Extract the following information from the text below and output it as JSON.\nFields:\n";
  for (const auto& field : params.schema) {
    text += "- " + field.name;
    if (!field.description.empty()) text += (zh ? "：" : ": ") + field.description;
    text += "\n";
  }
  text += zh ? "輸出格式：" : "Output format: ";
  text += shape.dump(-1, ' ', false);
  text += "\n";
  text += zh ? "限制：所有 value 必須為 list 格式，且 list 中不得再有巢狀結構；只輸出擷取到的資訊。"
             : "Constraints: every value must be a list and lists must not contain nested "
               "structures; output only the extracted information.";
  return text;
}

}  // namespace

std::span<const Triple> kge_exemplar_triples(Language language) {
  return language == Language::kZh ? std::span<const Triple>(kExemplarZh)
                                   : std::span<const Triple>(kExemplarEn);
}

std::string kge_exemplar_block(Language language) {
  std::string block(language == Language::kZh ? kKgeExemplarHeader
                                              : "【1. Triple format (Subject－Relation－Object)】");
  block += "\n";
  block += format_triples(kge_exemplar_triples(language));
  return block;
}

std::string instruction_template(Task task, const InstructionParams& params) {
  const bool zh = params.language == Language::kZh;
  switch (task) {
    case Task::kKge:
      return std::string(zh ? kKgeInstructionPrefix : kKgeInstructionPrefixEn) + (zh ? "「" : "\n") +
             kge_exemplar_block(params.language) + (zh ? "」" : "");
    case Task::kNer:
      return std::string(zh ? kNerInstruction : kNerInstructionEn);
    case Task::kJsonExtract:
      return json_schema_instruction(params);
  }
  throw InvalidArgument("unknown task");
}

std::string render_instruction(Task task, const InstructionParams& params) {
  if (task != Task::kJsonExtract && !params.context) {
    throw InvalidArgument(std::string(to_string(task)) + " instruction needs a context");
  }
  std::string text = instruction_template(task, params);
  if (params.context) {
    text += "\n";
    text += *params.context;
  }
  return text;
}

}  // namespace sieval
