#include "sieval/task.hpp"

#include <string>

#include "sieval/errors.hpp"

namespace sieval {

std::string_view to_string(Task task) {
  switch (task) {
    case Task::kJsonExtract: return "json-extract";
    case Task::kKge: return "kge";
    case Task::kNer: return "ner";
  }
  return "unknown";
}

Task parse_task(std::string_view tag) {
  for (Task task : kAllTasks) {
    if (to_string(task) == tag) return task;
  }
  throw InvalidArgument("unknown task '" + std::string(tag) + "' (expected json-extract, kge or ner)");
}

}  // namespace sieval
