#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <advscore/attribution.hpp>
#include <advscore/rng.hpp>

using namespace advscore;

namespace {

struct Planted {
  FeatureMatrix features;
  std::vector<ItemScore> scores;
  std::string planted;
};

// One feature adds +0.3 to the advscore; everything else is noise.
Planted planted_data(int n_items, int n_features, std::uint64_t seed, double effect = 0.3,
                     double noise = 0.05) {
  Planted data;
  Rng rng(seed);
  for (int f = 0; f < n_features; ++f) {
    data.features.feature_names.push_back("f" + std::to_string(f));
  }
  data.planted = "f0";
  for (int i = 0; i < n_items; ++i) {
    const std::string id = "q" + std::to_string(i);
    data.features.item_ids.push_back(id);
    std::vector<std::uint8_t> row(n_features, 0);
    for (int f = 0; f < n_features; ++f) row[f] = rng.uniform() < 0.5 ? 1 : 0;
    data.features.indicators.push_back(row);
    ItemScore score;
    score.item_id = id;
    score.advscore = 0.1 + effect * row[0] + noise * rng.normal();
    data.scores.push_back(score);
  }
  return data;
}

std::string top_feature(const AttributionResult& result) {
  std::string best;
  double best_value = -1e300;
  for (const auto& [name, value] : result.coefficients) {
    if (value > best_value) {
      best_value = value;
      best = name;
    }
  }
  return best;
}

double coefficient_norm(const AttributionResult& result) {
  double sq = result.intercept * result.intercept;
  for (const auto& [name, value] : result.coefficients) sq += value * value;
  return std::sqrt(sq);
}

}  // namespace

TEST_CASE("planted feature ranks first in both modes") {
  const Planted data = planted_data(120, 6, 81);
  const AttributionResult logistic =
      fit_attribution(data.features, data.scores, AttributionMode::LogisticAboveMedian, 1.0);
  CHECK(top_feature(logistic) == data.planted);
  CHECK(logistic.converged);

  const AttributionResult linear =
      fit_attribution(data.features, data.scores, AttributionMode::LinearOnScore, 1.0);
  CHECK(top_feature(linear) == data.planted);
  // Ridge with mean loss shrinks but keeps the effect dominant.
  CHECK(linear.coefficients.at(data.planted) > 0.05);
}

TEST_CASE("attribution is deterministic") {
  const Planted data = planted_data(80, 5, 82);
  const AttributionResult a =
      fit_attribution(data.features, data.scores, AttributionMode::LogisticAboveMedian, 1.0);
  const AttributionResult b =
      fit_attribution(data.features, data.scores, AttributionMode::LogisticAboveMedian, 1.0);
  CHECK(a.coefficients == b.coefficients);
  CHECK(a.intercept == b.intercept);

  const AttributionResult c =
      fit_attribution(data.features, data.scores, AttributionMode::LinearOnScore, 0.7);
  const AttributionResult d =
      fit_attribution(data.features, data.scores, AttributionMode::LinearOnScore, 0.7);
  CHECK(c.coefficients == d.coefficients);
}

TEST_CASE("all-zero feature columns shrink to zero") {
  Planted data = planted_data(60, 4, 83);
  for (auto& row : data.features.indicators) row[3] = 0;
  const AttributionResult linear =
      fit_attribution(data.features, data.scores, AttributionMode::LinearOnScore, 0.5);
  CHECK(linear.coefficients.at("f3") == 0.0);
  const AttributionResult logistic =
      fit_attribution(data.features, data.scores, AttributionMode::LogisticAboveMedian, 0.5);
  CHECK(std::abs(logistic.coefficients.at("f3")) <= 1e-7);
}

TEST_CASE("degenerate labels are rejected") {
  Planted data = planted_data(20, 3, 84);
  for (ItemScore& s : data.scores) s.advscore = 0.25;
  CHECK_THROWS_AS(
      fit_attribution(data.features, data.scores, AttributionMode::LogisticAboveMedian, 1.0),
      DegenerateTargetError);
}

TEST_CASE("singular normal equations demand regularization") {
  Planted data = planted_data(40, 4, 85);
  for (auto& row : data.features.indicators) row[2] = row[1];  // duplicated column
  CHECK_THROWS_AS(
      fit_attribution(data.features, data.scores, AttributionMode::LinearOnScore, 0.0),
      SingularityError);
  // With shrinkage the duplicated columns split the weight and solve fine.
  const AttributionResult regularized =
      fit_attribution(data.features, data.scores, AttributionMode::LinearOnScore, 0.5);
  CHECK(regularized.coefficients.at("f1") ==
        doctest::Approx(regularized.coefficients.at("f2")).epsilon(1e-9));
}

TEST_CASE("duplicating every item leaves linear coefficients unchanged") {
  const Planted data = planted_data(50, 4, 86);
  Planted doubled = data;
  for (std::size_t i = 0; i < data.features.item_ids.size(); ++i) {
    doubled.features.item_ids.push_back(data.features.item_ids[i] + "_dup");
    doubled.features.indicators.push_back(data.features.indicators[i]);
    ItemScore copy = data.scores[i];
    copy.item_id += "_dup";
    doubled.scores.push_back(copy);
  }
  const AttributionResult base =
      fit_attribution(data.features, data.scores, AttributionMode::LinearOnScore, 1.0);
  const AttributionResult twice =
      fit_attribution(doubled.features, doubled.scores, AttributionMode::LinearOnScore, 1.0);
  for (const auto& [name, value] : base.coefficients) {
    CHECK(value == doctest::Approx(twice.coefficients.at(name)).epsilon(1e-10));
  }
  CHECK(base.intercept == doctest::Approx(twice.intercept).epsilon(1e-10));
}

TEST_CASE("stronger regularization weakly shrinks the coefficients") {
  const Planted data = planted_data(70, 5, 87);
  const AttributionResult light =
      fit_attribution(data.features, data.scores, AttributionMode::LinearOnScore, 0.5);
  const AttributionResult heavy =
      fit_attribution(data.features, data.scores, AttributionMode::LinearOnScore, 5.0);
  CHECK(coefficient_norm(heavy) <= coefficient_norm(light) + 1e-12);
}

TEST_CASE("feature and score sets must agree") {
  Planted data = planted_data(10, 3, 88);
  data.scores.pop_back();
  CHECK_THROWS_AS(
      fit_attribution(data.features, data.scores, AttributionMode::LinearOnScore, 1.0),
      ConsistencyError);

  Planted renamed = planted_data(10, 3, 88);
  renamed.scores[0].item_id = "other";
  CHECK_THROWS_AS(
      fit_attribution(renamed.features, renamed.scores, AttributionMode::LinearOnScore, 1.0),
      ConsistencyError);
}

TEST_CASE("features_from_items builds sorted indicators") {
  std::vector<ItemMeta> items(3);
  items[0].id = "q0";
  items[0].tags = {"multi-hop", "geography"};
  items[1].id = "q1";
  items[1].tags = {"commonsense"};
  items[2].id = "q2";
  items[2].tags = {};
  const FeatureMatrix features = features_from_items(items);
  CHECK(features.feature_names ==
        std::vector<std::string>{"commonsense", "geography", "multi-hop"});
  CHECK(features.indicators[0] == std::vector<std::uint8_t>{0, 1, 1});
  CHECK(features.indicators[1] == std::vector<std::uint8_t>{1, 0, 0});
  CHECK(features.indicators[2] == std::vector<std::uint8_t>{0, 0, 0});
}
