#include <advscore/irt.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace advscore {

void validate_item(const ItemParams& item) {
  if (!std::isfinite(item.difficulty) || !std::isfinite(item.discrimination)) {
    throw InvalidArgumentError("item parameters must be finite");
  }
  if (item.discrimination <= 0.0) {
    throw InvalidArgumentError("item discrimination must be > 0, got " +
                               std::to_string(item.discrimination));
  }
}

Probability::Probability(double value) : value_(value) {
  if (!(value > 0.0 && value < 1.0)) {
    throw InvalidArgumentError("probability must lie inside (0,1), got " +
                               std::to_string(value));
  }
}

void validate_quadrature(const QuadratureConfig& quad) {
  if (!std::isfinite(quad.half_width_scale) || quad.half_width_scale <= 0.0) {
    throw ConfigError("quadrature half_width_scale must be finite and > 0");
  }
  if (!std::isfinite(quad.gamma_floor) || quad.gamma_floor <= 0.0) {
    throw ConfigError("quadrature gamma_floor must be finite and > 0");
  }
  if (quad.intervals <= 0 || quad.intervals % 2 != 0) {
    throw ConfigError("quadrature intervals must be positive and even, got " +
                      std::to_string(quad.intervals));
  }
}

Probability sigmoid(double x) {
  if (!std::isfinite(x)) {
    throw InvalidArgumentError("sigmoid: input must be finite");
  }
  double p;
  if (x >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    p = e / (1.0 + e);
  }
  // exp underflows past |x| ~ 745 and the quotient collapses onto an
  // endpoint; pin the result to the nearest interior double instead.
  p = std::clamp(p, std::numeric_limits<double>::denorm_min(), std::nextafter(1.0, 0.0));
  return Probability(p);
}

Probability p_correct(double skill, const ItemParams& item) {
  if (!std::isfinite(skill)) {
    throw InvalidArgumentError("p_correct: skill must be finite");
  }
  validate_item(item);
  double z = item.discrimination * (skill - item.difficulty);
  if (!std::isfinite(z)) {
    z = skill > item.difficulty ? 750.0 : -750.0;  // product overflowed; sign survives
  }
  return sigmoid(z);
}

double iif(double theta_eval, const ItemParams& item) {
  const double p = p_correct(theta_eval, item);
  return item.discrimination * item.discrimination * p * (1.0 - p);
}

double tif(const ItemParams& item, const QuadratureConfig& quad) {
  validate_item(item);
  validate_quadrature(quad);
  const double gamma_eff = std::max(item.discrimination, quad.gamma_floor);
  const double half_width = quad.half_width_scale / gamma_eff;
  const double lo = item.difficulty - half_width;
  const int n = quad.intervals;
  const double h = 2.0 * half_width / n;

  double sum = iif(lo, item) + iif(lo + n * h, item);
  for (int i = 1; i < n; ++i) {
    sum += iif(lo + i * h, item) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

double tif_closed_form(const ItemParams& item) {
  validate_item(item);
  return item.discrimination;
}

double kappa(const ItemParams& item, const QuadratureConfig& quad) {
  return 1.0 - std::exp(-tif(item, quad));
}

}  // namespace advscore
