#pragma once

#include <optional>
#include <string>
#include <vector>

#include <advscore/error.hpp>

namespace advscore {

enum class PoolKind { Human, Model };

const char* to_string(PoolKind kind);

// A respondent: a person or a model.
struct Subject {
  std::string id;
  PoolKind kind = PoolKind::Human;
  std::optional<int> year_introduced;  // models only
  std::optional<bool> expert_flag;     // humans only
};

// A benchmark question. Tags carry the tactic/topic labels used by the
// attribution regression.
struct ItemMeta {
  std::string id;
  std::vector<std::string> tags;
  std::optional<std::string> text;
  std::optional<std::string> answer;
};

// One graded answer.
struct ResponseRecord {
  std::string subject_id;
  std::string item_id;
  bool correct = false;
};

// Sparse binary response log. validate() enforces:
//   - unique subject and item ids,
//   - year_introduced only on models, expert_flag only on humans,
//   - every record references a declared subject and item,
//   - (subject, item) pairs are unique,
//   - every declared subject and item appears in at least one record.
struct ResponseMatrix {
  std::vector<Subject> subjects;
  std::vector<ItemMeta> items;
  std::vector<ResponseRecord> records;

  void validate() const;
};

}  // namespace advscore
