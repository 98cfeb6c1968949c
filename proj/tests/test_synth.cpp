#include <doctest.h>

#include <cmath>
#include <map>

#include <advscore/irt.hpp>
#include <advscore/synth.hpp>

using namespace advscore;

TEST_CASE("full density yields one record per pair") {
  SynthConfig config;
  config.n_humans = 7;
  config.n_models = 5;
  config.n_items = 11;
  config.seed = 91;
  const SynthTruth truth = generate(config);
  CHECK(truth.matrix.records.size() == 12u * 11u);
  CHECK(truth.matrix.subjects.size() == 12);
  CHECK(truth.matrix.items.size() == 11);
  truth.matrix.validate();
}

TEST_CASE("generation is bit-identical per seed") {
  SynthConfig config;
  config.n_humans = 10;
  config.n_models = 6;
  config.n_items = 9;
  config.response_density = 0.7;
  config.seed = 92;
  const SynthTruth a = generate(config);
  const SynthTruth b = generate(config);
  CHECK(a.true_skills == b.true_skills);
  CHECK(a.true_difficulties == b.true_difficulties);
  CHECK(a.true_discriminations == b.true_discriminations);
  REQUIRE(a.matrix.records.size() == b.matrix.records.size());
  for (std::size_t i = 0; i < a.matrix.records.size(); ++i) {
    CHECK(a.matrix.records[i].subject_id == b.matrix.records[i].subject_id);
    CHECK(a.matrix.records[i].item_id == b.matrix.records[i].item_id);
    CHECK(a.matrix.records[i].correct == b.matrix.records[i].correct);
  }

  config.seed = 93;
  const SynthTruth c = generate(config);
  CHECK(a.true_skills != c.true_skills);
}

TEST_CASE("partial density thins the record set") {
  SynthConfig config;
  config.n_humans = 20;
  config.n_models = 10;
  config.n_items = 50;
  config.response_density = 0.4;
  config.seed = 94;
  const SynthTruth truth = generate(config);
  const double expected = 30.0 * 50.0 * 0.4;
  CHECK(std::abs(static_cast<double>(truth.matrix.records.size()) - expected) <
        4.0 * std::sqrt(expected));
  truth.matrix.validate();
}

TEST_CASE("sampled discriminations match the gamma moments") {
  SynthConfig config;
  config.n_humans = 1;
  config.n_models = 1;
  config.n_items = 1000;
  config.seed = 95;
  const SynthTruth truth = generate(config);
  double sum = 0.0;
  for (const auto& [id, gamma] : truth.true_discriminations) {
    CHECK(gamma > 0.0);
    sum += gamma;
  }
  CHECK(sum / 1000.0 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("empirical correctness tracks the model probabilities") {
  SynthConfig config;
  config.n_humans = 60;
  config.n_models = 40;
  config.n_items = 80;
  config.seed = 96;
  const SynthTruth truth = generate(config);

  std::map<std::string, std::pair<int, int>> per_item;  // correct, total
  for (const ResponseRecord& r : truth.matrix.records) {
    auto& [correct, total] = per_item[r.item_id];
    correct += r.correct ? 1 : 0;
    ++total;
  }
  int outside = 0;
  for (const ItemMeta& item : truth.matrix.items) {
    const ItemParams ip{truth.true_difficulties.at(item.id),
                        truth.true_discriminations.at(item.id)};
    double p_mean = 0.0;
    for (const auto& [sid, beta] : truth.true_skills) p_mean += p_correct(beta, ip);
    p_mean /= static_cast<double>(truth.true_skills.size());
    const auto& [correct, total] = per_item.at(item.id);
    const double observed = static_cast<double>(correct) / total;
    const double sigma = std::sqrt(p_mean * (1.0 - p_mean) / total);
    if (std::abs(observed - p_mean) > 3.0 * sigma) ++outside;
  }
  // 3-sigma misses should be rare across 80 items.
  CHECK(outside <= 2);
}

TEST_CASE("config validation") {
  SynthConfig config;
  config.n_items = 0;
  CHECK_THROWS_AS(generate(config), InvalidArgumentError);
  config = {};
  config.response_density = 0.0;
  CHECK_THROWS_AS(generate(config), InvalidArgumentError);
  config = {};
  config.skill_stddev = 0.0;
  CHECK_THROWS_AS(generate(config), InvalidArgumentError);
}

TEST_CASE("recovery against the truth itself") {
  SynthConfig config;
  config.n_humans = 8;
  config.n_models = 6;
  config.n_items = 10;
  config.seed = 97;
  const SynthTruth truth = generate(config);

  IrtParameters echo;
  echo.skills = truth.true_skills;
  echo.difficulties = truth.true_difficulties;
  echo.discriminations = truth.true_discriminations;
  const RecoveryReport identical = recovery_report(truth, echo);
  CHECK(identical.r_skill == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(identical.r_difficulty == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(identical.r_discrimination == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(identical.rmse_skill == 0.0);
  CHECK(identical.rmse_difficulty == 0.0);

  IrtParameters negated = echo;
  for (auto& [id, beta] : negated.skills) beta = -beta;
  const RecoveryReport flipped = recovery_report(truth, negated);
  CHECK(flipped.r_skill == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("recovery_report demands matching keys") {
  SynthConfig config;
  config.n_humans = 3;
  config.n_models = 2;
  config.n_items = 4;
  config.seed = 98;
  const SynthTruth truth = generate(config);
  IrtParameters missing;
  missing.skills = truth.true_skills;
  missing.skills.erase(missing.skills.begin());
  missing.difficulties = truth.true_difficulties;
  missing.discriminations = truth.true_discriminations;
  CHECK_THROWS_AS(recovery_report(truth, missing), ConsistencyError);
}

TEST_CASE("pearson edge behavior") {
  CHECK(pearson({1.0, 2.0, 3.0}, {2.0, 4.0, 6.0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pearson({1.0, 2.0, 3.0}, {-1.0, -2.0, -3.0}) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK_THROWS_AS(pearson({}, {}), InvalidArgumentError);
  CHECK_THROWS_AS(pearson({1.0}, {1.0, 2.0}), InvalidArgumentError);
  CHECK(std::isnan(pearson({1.0, 1.0}, {1.0, 2.0})));
}
