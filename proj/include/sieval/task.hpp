#pragma once

#include <array>
#include <string_view>

namespace sieval {

enum class Task { kJsonExtract, kKge, kNer };

inline constexpr std::array<Task, 3> kAllTasks = {Task::kJsonExtract, Task::kKge, Task::kNer};

// "json-extract" | "kge" | "ner"
std::string_view to_string(Task task);
// Throws InvalidArgument on an unknown tag.
Task parse_task(std::string_view tag);

}  // namespace sieval
