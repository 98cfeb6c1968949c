#include <doctest.h>

#include <cmath>
#include <limits>

#include <advscore/irt.hpp>
#include <advscore/rng.hpp>

using namespace advscore;

TEST_CASE("sigmoid anchors") {
  CHECK(static_cast<double>(sigmoid(0.0)) == 0.5);
  CHECK(static_cast<double>(sigmoid(1.0)) == doctest::Approx(0.7310585786300049).epsilon(1e-12));
  CHECK(static_cast<double>(sigmoid(-1.0)) == doctest::Approx(0.2689414213699951).epsilon(1e-12));
}

TEST_CASE("sigmoid symmetry and range") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const double x = (rng.uniform() - 0.5) * 40.0;
    const double p = sigmoid(x);
    const double q = sigmoid(-x);
    CHECK(p + q == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p > 0.0);
    CHECK(p < 1.0);
  }
}

TEST_CASE("sigmoid stays inside (0,1) at extreme arguments") {
  for (double x : {500.0, 750.0, 5000.0, -500.0, -750.0, -5000.0}) {
    const double p = sigmoid(x);
    CHECK(p > 0.0);
    CHECK(p < 1.0);
  }
}

TEST_CASE("sigmoid rejects non-finite input") {
  CHECK_THROWS_AS(sigmoid(std::numeric_limits<double>::quiet_NaN()), InvalidArgumentError);
  CHECK_THROWS_AS(sigmoid(std::numeric_limits<double>::infinity()), InvalidArgumentError);
}

TEST_CASE("p_correct is 0.5 exactly at the difficulty") {
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    const double theta = (rng.uniform() - 0.5) * 8.0;
    const double gamma = rng.gamma(2.0, 1.0);
    CHECK(static_cast<double>(p_correct(theta, {theta, gamma})) == 0.5);
  }
}

TEST_CASE("p_correct matches the sigmoid of the scaled gap") {
  CHECK(static_cast<double>(p_correct(1.0, {0.0, 1.0})) ==
        doctest::Approx(0.7310585786300049).epsilon(1e-12));
  // Vanishing discrimination flattens the curve toward 0.5.
  CHECK(static_cast<double>(p_correct(1.0, {0.0, 1e-12})) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("p_correct monotonicity") {
  const ItemParams item{0.3, 1.7};
  double prev = 0.0;
  for (double skill = -5.0; skill <= 5.0; skill += 0.25) {
    const double p = p_correct(skill, item);
    CHECK(p > prev);
    prev = p;
  }
  // Decreasing in difficulty at fixed skill.
  CHECK(static_cast<double>(p_correct(0.0, {1.0, 2.0})) <
        static_cast<double>(p_correct(0.0, {-1.0, 2.0})));
}

TEST_CASE("p_correct validates the item") {
  CHECK_THROWS_AS(p_correct(0.0, {0.0, 0.0}), InvalidArgumentError);
  CHECK_THROWS_AS(p_correct(0.0, {0.0, -1.0}), InvalidArgumentError);
  CHECK_THROWS_AS(p_correct(std::numeric_limits<double>::quiet_NaN(), {0.0, 1.0}),
                  InvalidArgumentError);
}

TEST_CASE("iif peak value and location") {
  // gamma^2 / 4 at theta_eval == difficulty.
  CHECK(iif(0.7, {0.7, 2.0}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(iif(-1.2, {-1.2, 3.0}) == doctest::Approx(9.0 / 4.0).epsilon(1e-14));
  Rng rng(13);
  for (int i = 0; i < 50; ++i) {
    const ItemParams item{rng.normal(), rng.gamma(2.0, 1.0)};
    const double offset = rng.uniform() * 4.0 + 0.01;
    CHECK(iif(item.difficulty, item) >= iif(item.difficulty + offset, item));
    CHECK(iif(item.difficulty, item) >= iif(item.difficulty - offset, item));
  }
}

TEST_CASE("iif symmetry about the difficulty") {
  Rng rng(14);
  for (int i = 0; i < 200; ++i) {
    const ItemParams item{rng.normal(), rng.gamma(2.0, 1.0)};
    const double a = rng.uniform() * 6.0;
    CHECK(std::abs(iif(item.difficulty + a, item) - iif(item.difficulty - a, item)) <= 1e-12);
  }
}

TEST_CASE("iif vanishes with the discrimination") {
  CHECK(iif(2.0, {0.0, 1e-9}) <= 1e-18);
  CHECK(iif(2.0, {0.0, 1e-9}) >= 0.0);
}

TEST_CASE("tif matches the closed form") {
  for (double gamma : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
    const ItemParams item{0.4, gamma};
    CHECK(std::abs(tif(item) - tif_closed_form(item)) <= 1e-5);
  }
  CHECK(tif({0.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(tif({0.0, 3.3}) == doctest::Approx(3.3).epsilon(1e-5));
  CHECK(tif({0.0, 1e-6}) <= 1e-9);  // gamma^2 kills the integrand
}

TEST_CASE("tif validates its configuration") {
  QuadratureConfig quad;
  quad.intervals = 5;
  CHECK_THROWS_AS(tif({0.0, 1.0}, quad), ConfigError);
  quad.intervals = 0;
  CHECK_THROWS_AS(tif({0.0, 1.0}, quad), ConfigError);
  quad = {};
  quad.half_width_scale = -1.0;
  CHECK_THROWS_AS(tif({0.0, 1.0}, quad), ConfigError);
  quad = {};
  quad.gamma_floor = 0.0;
  CHECK_THROWS_AS(tif({0.0, 1.0}, quad), ConfigError);
}

TEST_CASE("kappa values and monotonicity") {
  CHECK(kappa({0.0, 1.0}) == doctest::Approx(0.6321205588285577).epsilon(1e-6));
  CHECK(kappa({0.0, 3.2968}) == doctest::Approx(0.963).epsilon(5e-4));
  CHECK(kappa({0.0, 1e-6}) <= 1e-8);

  double prev = -1.0;
  for (double gamma : {0.1, 0.3, 0.8, 1.5, 3.0, 6.0, 12.0}) {
    const double k = kappa({0.0, gamma});
    CHECK(k > prev);
    CHECK(k >= 0.0);
    CHECK(k < 1.0);
    prev = k;
  }
}

TEST_CASE("probability type rejects endpoint values") {
  CHECK_THROWS_AS(Probability(0.0), InvalidArgumentError);
  CHECK_THROWS_AS(Probability(1.0), InvalidArgumentError);
  CHECK_THROWS_AS(Probability(-0.3), InvalidArgumentError);
  CHECK_THROWS_AS(Probability(std::numeric_limits<double>::quiet_NaN()), InvalidArgumentError);
  CHECK(Probability(0.25).value() == 0.25);
}
