#include "sieval/trainer_config.hpp"

#include <charconv>
#include <map>

#include "sieval/csv.hpp"
#include "sieval/digest.hpp"
#include "sieval/errors.hpp"
#include "sieval/unicode.hpp"

namespace sieval {

void validate(const TrainerConfig& cfg) {
  if (cfg.base_model.empty()) throw ValidationError("trainer config: base_model is empty");
  if (cfg.lora_rank <= 0) throw ValidationError("trainer config: lora_rank must be positive");
  if (cfg.lora_alpha <= 0) throw ValidationError("trainer config: lora_alpha must be positive");
  if (!(cfg.lora_dropout >= 0.0 && cfg.lora_dropout <= 1.0)) {
    throw ValidationError("trainer config: lora_dropout must lie in [0, 1]");
  }
  if (!(cfg.learning_rate > 0.0)) throw ValidationError("trainer config: learning_rate must be positive");
  if (!(cfg.max_grad_norm > 0.0)) throw ValidationError("trainer config: max_grad_norm must be positive");
  if (cfg.epochs <= 0) throw ValidationError("trainer config: epochs must be positive");
  if (cfg.effective_batch_size <= 0) throw ValidationError("trainer config: batch size must be positive");
  if (cfg.quantization != "none") {
    throw ValidationError("trainer config: only quantization 'none' is supported");
  }
}

namespace {

// YAML 1.1 loaders read "1e-07" as a string; keep a dot in the mantissa.
std::string yaml_float(double value) {
  std::string s = csv::format_double(value);
  const std::size_t exp = s.find_first_of("eE");
  const std::string mantissa = s.substr(0, exp);
  if (mantissa.find('.') == std::string::npos) {
    s.insert(exp == std::string::npos ? s.size() : exp, ".0");
  }
  return s;
}

}  // namespace

std::string render_trainer_config(const TrainerConfig& cfg) {
  validate(cfg);
  std::string out;
  const auto line = [&](std::string_view key, const std::string& value) {
    out += key;
    out += ": ";
    out += value;
    out += "\n";
  };
  line("model_name_or_path", cfg.base_model);
  line("stage", "sft");
  line("do_train", "true");
  line("finetuning_type", "lora");
  line("lora_target", "all");
  line("lora_rank", std::to_string(cfg.lora_rank));
  line("lora_alpha", std::to_string(cfg.lora_alpha));
  line("lora_dropout", yaml_float(cfg.lora_dropout));
  line("learning_rate", yaml_float(cfg.learning_rate));
  line("max_grad_norm", yaml_float(cfg.max_grad_norm));
  line("num_train_epochs", yaml_float(static_cast<double>(cfg.epochs)));
  line("per_device_train_batch_size", std::to_string(cfg.effective_batch_size));
  line("gradient_accumulation_steps", "1");
  return out;
}

namespace {

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("trainer config: '" + key + "' is not a number: " + value);
  }
}

int to_int(const std::string& key, const std::string& value) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    // num_train_epochs is written as a float.
    const double d = to_double(key, value);
    if (d != static_cast<int>(d)) throw ValidationError("trainer config: '" + key + "' must be an integer");
    return static_cast<int>(d);
  }
  return v;
}

}  // namespace

TrainerConfig parse_trainer_config(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = unicode::trim(text.substr(start, end - start));
    start = end + 1;
    if (line.empty() || line.starts_with('#')) continue;
    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) throw ValidationError("trainer config: bad line '" + std::string(line) + "'");
    kv[std::string(unicode::trim(line.substr(0, colon)))] = std::string(unicode::trim(line.substr(colon + 1)));
  }
  TrainerConfig cfg;
  if (auto it = kv.find("model_name_or_path"); it != kv.end()) cfg.base_model = it->second;
  if (auto it = kv.find("lora_rank"); it != kv.end()) cfg.lora_rank = to_int(it->first, it->second);
  if (auto it = kv.find("lora_alpha"); it != kv.end()) cfg.lora_alpha = to_int(it->first, it->second);
  if (auto it = kv.find("lora_dropout"); it != kv.end()) cfg.lora_dropout = to_double(it->first, it->second);
  if (auto it = kv.find("learning_rate"); it != kv.end()) cfg.learning_rate = to_double(it->first, it->second);
  if (auto it = kv.find("max_grad_norm"); it != kv.end()) cfg.max_grad_norm = to_double(it->first, it->second);
  if (auto it = kv.find("num_train_epochs"); it != kv.end()) cfg.epochs = to_int(it->first, it->second);
  int per_device = cfg.effective_batch_size;
  int accumulation = 1;
  if (auto it = kv.find("per_device_train_batch_size"); it != kv.end()) per_device = to_int(it->first, it->second);
  if (auto it = kv.find("gradient_accumulation_steps"); it != kv.end()) accumulation = to_int(it->first, it->second);
  cfg.effective_batch_size = per_device * accumulation;
  if (auto it = kv.find("quantization_bit"); it != kv.end()) cfg.quantization = "int" + it->second;
  return cfg;
}

void emit_trainer_config(const TrainerConfig& cfg, const std::filesystem::path& path) {
  write_file(path, render_trainer_config(cfg));
}

}  // namespace sieval
