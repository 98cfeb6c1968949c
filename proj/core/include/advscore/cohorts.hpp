#pragma once

#include <optional>
#include <string>
#include <vector>

#include <advscore/fit.hpp>
#include <advscore/types.hpp>

namespace advscore {

// Per-pool skill statistics. Humans and models are always standardized
// separately.
struct PoolStats {
  double mean_skill = 0.0;
  double stddev_skill = 0.0;  // population standard deviation
  int count = 0;
};

// A pool-relative subset of subjects together with its representative
// (mean) skill.
struct SkilledGroup {
  std::vector<std::string> member_ids;  // sorted, unique
  PoolKind pool_kind = PoolKind::Human;
  double expertise_level = 0.0;       // k; not meaningful when expert_flagged
  double representative_skill = 0.0;  // mean of members' fitted skills
  bool degenerate = false;   // strict threshold was empty; fell back to the top subject
  bool expert_flagged = false;  // built from explicit expert flags, no thresholding
};

// Mean / population stddev / count of fitted skills over one pool.
// Order-independent: contributions are accumulated in sorted-id order.
// Throws EmptyPoolError when the pool has no subjects.
PoolStats pool_stats(const IrtParameters& params, const std::vector<Subject>& subjects,
                     PoolKind kind);

// Members are exactly the pool subjects whose skill strictly exceeds
// mean + k * stddev. When that strict threshold selects nobody (all skills
// equal, or k too large), the single highest-skill subject is returned
// instead (ties broken by smallest id) and the group is flagged degenerate.
SkilledGroup select_group(const IrtParameters& params, const std::vector<Subject>& subjects,
                          PoolKind kind, double k);

// The explicitly flagged human experts, taken verbatim with no threshold.
// Returns nullopt when nobody is flagged; callers then fall back to the
// humans-at-k=1 group.
std::optional<SkilledGroup> expert_group(const IrtParameters& params,
                                         const std::vector<Subject>& subjects);

}  // namespace advscore
