#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <advscore/score.hpp>
#include <advscore/types.hpp>

namespace advscore {

// Binary item-by-feature indicators for the tactic/topic regression.
struct FeatureMatrix {
  std::vector<std::string> item_ids;
  std::vector<std::string> feature_names;
  std::vector<std::vector<std::uint8_t>> indicators;  // item-major, entries 0/1
};

// Builds the indicator matrix from the items' tags: feature names are the
// sorted distinct tags, rows follow the items' order.
FeatureMatrix features_from_items(const std::vector<ItemMeta>& items);

enum class AttributionMode {
  LogisticAboveMedian,  // classify advscore > dataset median
  LinearOnScore,        // ridge regression on the raw advscore
};

struct AttributionResult {
  std::map<std::string, double> coefficients;  // sorted by feature name
  double intercept = 0.0;
  AttributionMode mode = AttributionMode::LogisticAboveMedian;
  double regularization_strength = 1.0;
  int iterations = 0;      // gradient-descent iterations (logistic mode)
  bool converged = true;
};

// Regresses item AdvScores on the feature indicators. Both modes use mean
// data loss plus (l2/2)*||w||^2 with every coordinate penalized, so
// duplicating all rows leaves the solution unchanged and l2 > 0 guarantees
// uniqueness. Logistic mode runs deterministic full-batch gradient descent
// from zero until the gradient norm drops below 1e-8 (or 1e5 iterations);
// linear mode solves the normal equations in closed form.
//
// Throws ConsistencyError when features and scores do not cover the same
// item ids, DegenerateTargetError when the median split yields one class,
// and SingularityError when the normal equations are singular (use l2 > 0).
AttributionResult fit_attribution(const FeatureMatrix& features,
                                  const std::vector<ItemScore>& scores,
                                  AttributionMode mode = AttributionMode::LogisticAboveMedian,
                                  double l2 = 1.0, std::uint64_t seed = 0);

}  // namespace advscore
