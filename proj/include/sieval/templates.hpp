#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sieval/structure.hpp"
#include "sieval/task.hpp"

namespace sieval {

enum class Language { kZh, kEn };

std::string_view to_string(Language language);
Language parse_language(std::string_view tag);

// Chinese instruction openings, kept byte-for-byte.
inline constexpr std::string_view kKgeInstructionPrefix = "請幫我為下面文章建構知識圖譜。請以這種方式輸出：";
inline constexpr std::string_view kKgeExemplarHeader = "【一、三元組格式（主詞－關係－受詞）】";
inline constexpr std::string_view kNerInstruction =
    "請為下文執行 NER 任務。請輸出成 JSON 且 value 必須為 list 格式，而其中不得再有巢狀結構。";

inline constexpr std::string_view kKgeInstructionPrefixEn =
    "Please construct a knowledge graph for the following article. Output in the following format:";
inline constexpr std::string_view kNerInstructionEn =
    "Please perform a named entity recognition (NER) task for the following text. Output the "
    "results in JSON format, ensuring that every value is a list and that no lists contain nested "
    "structures.";

// The sixteen exemplar triples embedded in the KGE instruction.
std::span<const Triple> kge_exemplar_triples(Language language = Language::kZh);
// Header line followed by one exemplar triple per line.
std::string kge_exemplar_block(Language language = Language::kZh);

struct SchemaField {
  std::string name;
  std::string description;  // optional

  bool operator==(const SchemaField&) const = default;
};

struct InstructionParams {
  Language language = Language::kZh;
  std::vector<SchemaField> schema;     // json-extract: required, non-empty
  std::optional<std::string> context;  // kge / ner: required by render_instruction
};

// Instruction text without the article. For kge and ner this is the fixed
// template; for json-extract it embeds the field list and the flat-list
// constraint. Throws InvalidArgument when json-extract has no schema.
std::string instruction_template(Task task, const InstructionParams& params);

// Full prompt: instruction_template followed by a newline and the context.
// kge and ner require a context; json-extract renders without one if absent.
std::string render_instruction(Task task, const InstructionParams& params);

}  // namespace sieval
