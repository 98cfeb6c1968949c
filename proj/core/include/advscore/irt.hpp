#pragma once

#include <advscore/error.hpp>

namespace advscore {

// Latent parameters of one two-parameter-logistic item.
struct ItemParams {
  double difficulty = 0.0;      // location on the latent scale
  double discrimination = 1.0;  // sensitivity to the skill gap; must be > 0
};

// Throws InvalidArgumentError unless both fields are finite and
// discrimination is strictly positive.
void validate_item(const ItemParams& item);

// A correctness probability, guaranteed to lie inside the open interval
// (0,1). Converts implicitly to double.
class Probability {
 public:
  explicit Probability(double value);
  double value() const { return value_; }
  operator double() const { return value_; }

 private:
  double value_;
};

// Grid for the total-information integral. The integrand decays like
// exp(-discrimination * |theta - difficulty|), so the grid spans
// difficulty +/- half_width_scale / max(discrimination, gamma_floor) and is
// integrated with composite Simpson's rule over `intervals` subintervals.
// The truncated tail mass is 2 * discrimination * exp(-half_width_scale);
// 24 e-foldings keep it below 1e-9 across discriminations up to 10.
struct QuadratureConfig {
  double half_width_scale = 24.0;
  double gamma_floor = 0.05;
  int intervals = 2048;  // positive and even
};

// Throws ConfigError on invalid bounds or step counts.
void validate_quadrature(const QuadratureConfig& quad);

// Numerically stable logistic function. Throws InvalidArgumentError on
// non-finite input; the result never reaches 0 or 1.
Probability sigmoid(double x);

// P(correct) = sigmoid(discrimination * (skill - difficulty)).
// Strictly increasing in skill. Equals 0.5 exactly when skill == difficulty.
Probability p_correct(double skill, const ItemParams& item);

// Item information at a given latent trait value:
// discrimination^2 * p * (1 - p). Nonnegative, peaks at the difficulty
// with value discrimination^2 / 4, symmetric about the difficulty.
double iif(double theta_eval, const ItemParams& item);

// Total item information: the integral of iif over the latent scale,
// evaluated by quadrature. Matches tif_closed_form within ~1e-5 for
// discriminations in [0.1, 10] under the default grid.
double tif(const ItemParams& item, const QuadratureConfig& quad = {});

// The integral above has the closed form: it equals the discrimination.
// Kept separate so the quadrature path can be checked against it.
double tif_closed_form(const ItemParams& item);

// Calibrated discriminability: 1 - exp(-tif). Lies in [0,1), strictly
// increasing in the discrimination.
double kappa(const ItemParams& item, const QuadratureConfig& quad = {});

}  // namespace advscore
