#include <advscore/types.hpp>

#include <unordered_map>
#include <unordered_set>

namespace advscore {

const char* to_string(PoolKind kind) {
  return kind == PoolKind::Human ? "human" : "model";
}

void ResponseMatrix::validate() const {
  std::unordered_map<std::string, const Subject*> subject_by_id;
  subject_by_id.reserve(subjects.size());
  for (const Subject& s : subjects) {
    if (s.id.empty()) {
      throw InvalidArgumentError("subject with empty id");
    }
    if (!subject_by_id.emplace(s.id, &s).second) {
      throw ConflictError("duplicate subject id '" + s.id + "'");
    }
    if (s.kind == PoolKind::Human && s.year_introduced) {
      throw InvalidArgumentError("human subject '" + s.id + "' must not have a year");
    }
    if (s.kind == PoolKind::Model && s.expert_flag) {
      throw InvalidArgumentError("model subject '" + s.id + "' must not have an expert flag");
    }
  }

  std::unordered_set<std::string> item_ids;
  item_ids.reserve(items.size());
  for (const ItemMeta& item : items) {
    if (item.id.empty()) {
      throw InvalidArgumentError("item with empty id");
    }
    if (!item_ids.insert(item.id).second) {
      throw ConflictError("duplicate item id '" + item.id + "'");
    }
  }

  std::unordered_set<std::string> seen_pairs;
  seen_pairs.reserve(records.size());
  std::unordered_set<std::string> touched_subjects;
  std::unordered_set<std::string> touched_items;
  for (const ResponseRecord& r : records) {
    if (!subject_by_id.count(r.subject_id)) {
      throw ReferenceError("record references unknown subject '" + r.subject_id + "'");
    }
    if (!item_ids.count(r.item_id)) {
      throw ReferenceError("record references unknown item '" + r.item_id + "'");
    }
    // '\n' cannot occur inside an id coming from the CSV layer unquoted;
    // it is only a separator for the pair key here.
    if (!seen_pairs.insert(r.subject_id + '\n' + r.item_id).second) {
      throw ConflictError("duplicate response for subject '" + r.subject_id + "' and item '" +
                          r.item_id + "'");
    }
    touched_subjects.insert(r.subject_id);
    touched_items.insert(r.item_id);
  }

  for (const Subject& s : subjects) {
    if (!touched_subjects.count(s.id)) {
      throw ReferenceError("subject '" + s.id + "' has no responses");
    }
  }
  for (const ItemMeta& item : items) {
    if (!touched_items.count(item.id)) {
      throw ReferenceError("item '" + item.id + "' has no responses");
    }
  }
}

}  // namespace advscore
