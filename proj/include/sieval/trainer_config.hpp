#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace sieval {

// LoRA fine-tuning hyperparameters, emitted for an external trainer.
struct TrainerConfig {
  std::string base_model = "meta-llama/Llama-3.2-1B-Instruct";
  int lora_rank = 32;
  int lora_alpha = 64;
  double lora_dropout = 0.4;
  double learning_rate = 1e-7;
  double max_grad_norm = 0.1;
  int epochs = 100;
  int effective_batch_size = 2;
  std::string quantization = "none";

  bool operator==(const TrainerConfig&) const = default;
};

// Throws ValidationError on out-of-range values (dropout outside [0,1],
// non-positive rank/alpha/lr/grad norm/epochs/batch, quantization other than "none").
void validate(const TrainerConfig& cfg);

// Flat `key: value` file using LlamaFactory argument names:
//   model_name_or_path, lora_rank, lora_alpha, lora_dropout, learning_rate,
//   max_grad_norm, num_train_epochs, per_device_train_batch_size (with
//   gradient_accumulation_steps: 1, so it equals the effective batch).
// No quantization_bit key is written; its absence means no quantization.
std::string render_trainer_config(const TrainerConfig& cfg);
TrainerConfig parse_trainer_config(std::string_view text);

void emit_trainer_config(const TrainerConfig& cfg, const std::filesystem::path& path);

}  // namespace sieval
