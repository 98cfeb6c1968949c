#include <advscore/cohorts.hpp>

#include <algorithm>
#include <cmath>
#include <utility>

namespace advscore {

namespace {

// (id, skill) pairs of one pool, sorted by id so every downstream sum is
// independent of the subjects' declaration order.
std::vector<std::pair<std::string, double>> pool_skills(const IrtParameters& params,
                                                        const std::vector<Subject>& subjects,
                                                        PoolKind kind) {
  std::vector<std::pair<std::string, double>> out;
  for (const Subject& s : subjects) {
    if (s.kind != kind) continue;
    const auto it = params.skills.find(s.id);
    if (it == params.skills.end()) {
      throw ConsistencyError("no fitted skill for subject '" + s.id + "'");
    }
    out.emplace_back(s.id, it->second);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double mean_skill(const std::vector<std::pair<std::string, double>>& members) {
  double sum = 0.0;
  for (const auto& [id, skill] : members) sum += skill;
  return sum / static_cast<double>(members.size());
}

SkilledGroup make_group(std::vector<std::pair<std::string, double>> members, PoolKind kind,
                        double k) {
  SkilledGroup group;
  group.pool_kind = kind;
  group.expertise_level = k;
  group.representative_skill = mean_skill(members);
  group.member_ids.reserve(members.size());
  for (auto& [id, skill] : members) group.member_ids.push_back(std::move(id));
  return group;
}

}  // namespace

PoolStats pool_stats(const IrtParameters& params, const std::vector<Subject>& subjects,
                     PoolKind kind) {
  const auto pool = pool_skills(params, subjects, kind);
  if (pool.empty()) {
    throw EmptyPoolError(std::string("no subjects in the ") + to_string(kind) + " pool");
  }
  double lo = pool.front().second;
  double hi = lo;
  for (const auto& [id, skill] : pool) {
    lo = std::min(lo, skill);
    hi = std::max(hi, skill);
  }

  PoolStats stats;
  stats.count = static_cast<int>(pool.size());
  if (lo == hi) {
    // All skills equal: the stddev is exactly zero, no rounding residue.
    stats.mean_skill = lo;
    stats.stddev_skill = 0.0;
    return stats;
  }
  stats.mean_skill = mean_skill(pool);
  double ss = 0.0;
  for (const auto& [id, skill] : pool) {
    const double d = skill - stats.mean_skill;
    ss += d * d;
  }
  stats.stddev_skill = std::sqrt(ss / static_cast<double>(pool.size()));
  return stats;
}

SkilledGroup select_group(const IrtParameters& params, const std::vector<Subject>& subjects,
                          PoolKind kind, double k) {
  const auto pool = pool_skills(params, subjects, kind);
  if (pool.empty()) {
    throw EmptyPoolError(std::string("no subjects in the ") + to_string(kind) + " pool");
  }
  const PoolStats stats = pool_stats(params, subjects, kind);
  const double threshold = stats.mean_skill + k * stats.stddev_skill;

  std::vector<std::pair<std::string, double>> members;
  for (const auto& entry : pool) {
    if (entry.second > threshold) members.push_back(entry);
  }
  if (!members.empty()) {
    return make_group(std::move(members), kind, k);
  }

  // Strict threshold selected nobody: fall back to the single top-skill
  // subject, smallest id on ties (pool is id-sorted, so the first max wins).
  const auto* top = &pool.front();
  for (const auto& entry : pool) {
    if (entry.second > top->second) top = &entry;
  }
  SkilledGroup group = make_group({*top}, kind, k);
  group.degenerate = true;
  return group;
}

std::optional<SkilledGroup> expert_group(const IrtParameters& params,
                                         const std::vector<Subject>& subjects) {
  std::vector<std::pair<std::string, double>> members;
  for (const Subject& s : subjects) {
    if (s.kind != PoolKind::Human || !s.expert_flag.value_or(false)) continue;
    const auto it = params.skills.find(s.id);
    if (it == params.skills.end()) {
      throw ConsistencyError("no fitted skill for subject '" + s.id + "'");
    }
    members.emplace_back(s.id, it->second);
  }
  if (members.empty()) return std::nullopt;
  std::sort(members.begin(), members.end());
  SkilledGroup group = make_group(std::move(members), PoolKind::Human, 0.0);
  group.expert_flagged = true;
  return group;
}

}  // namespace advscore
