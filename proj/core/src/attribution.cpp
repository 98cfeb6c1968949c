#include <advscore/attribution.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

namespace advscore {

namespace {

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Rows of the design matrix: intercept column then the features.
struct Design {
  std::size_t n = 0;
  std::size_t d = 0;  // including the intercept column
  std::vector<double> x;  // row-major n x d
  std::vector<double> y;

  double at(std::size_t row, std::size_t col) const { return x[row * d + col]; }
};

Design build_design(const FeatureMatrix& features, const std::vector<ItemScore>& scores) {
  if (features.item_ids.size() != features.indicators.size()) {
    throw ConsistencyError("feature matrix rows do not match its item ids");
  }
  std::unordered_map<std::string, double> advscore_of;
  advscore_of.reserve(scores.size());
  for (const ItemScore& s : scores) {
    if (!advscore_of.emplace(s.item_id, s.advscore).second) {
      throw ConflictError("duplicate score for item '" + s.item_id + "'");
    }
  }
  if (advscore_of.size() != features.item_ids.size()) {
    throw ConsistencyError("features and scores cover different item sets");
  }
  {
    std::unordered_map<std::string, int> seen;
    for (const std::string& id : features.item_ids) {
      if (++seen[id] > 1) throw ConflictError("duplicate item id '" + id + "' in feature matrix");
    }
  }

  Design design;
  design.n = features.item_ids.size();
  design.d = features.feature_names.size() + 1;
  design.x.assign(design.n * design.d, 0.0);
  design.y.assign(design.n, 0.0);
  for (std::size_t i = 0; i < design.n; ++i) {
    const auto it = advscore_of.find(features.item_ids[i]);
    if (it == advscore_of.end()) {
      throw ConsistencyError("no score for item '" + features.item_ids[i] + "'");
    }
    design.y[i] = it->second;
    const auto& row = features.indicators[i];
    if (row.size() != features.feature_names.size()) {
      throw ConsistencyError("indicator row width mismatch for item '" + features.item_ids[i] +
                             "'");
    }
    design.x[i * design.d] = 1.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      design.x[i * design.d + 1 + j] = row[j] ? 1.0 : 0.0;
    }
  }
  return design;
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// Deterministic full-batch gradient descent on the mean logistic loss plus
// (l2/2) ||w||^2, with a 1/L step from the trace bound on the Hessian.
std::vector<double> logistic_gd(const Design& design, const std::vector<double>& labels,
                                double l2, int& iterations, bool& converged) {
  const std::size_t n = design.n;
  const std::size_t d = design.d;
  double trace = 0.0;
  for (double v : design.x) trace += v * v;
  const double lipschitz = trace / (4.0 * static_cast<double>(n)) + l2;
  const double step = 1.0 / lipschitz;

  std::vector<double> w(d, 0.0);
  std::vector<double> grad(d, 0.0);
  constexpr double kGradTol = 1e-8;
  constexpr int kMaxIter = 100000;

  converged = false;
  for (iterations = 0; iterations < kMaxIter; ++iterations) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double z = 0.0;
      for (std::size_t j = 0; j < d; ++j) z += design.at(i, j) * w[j];
      const double r = stable_sigmoid(z) - labels[i];
      for (std::size_t j = 0; j < d; ++j) grad[j] += design.at(i, j) * r;
    }
    double norm_sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      grad[j] = grad[j] / static_cast<double>(n) + l2 * w[j];
      norm_sq += grad[j] * grad[j];
    }
    if (std::sqrt(norm_sq) < kGradTol) {
      converged = true;
      break;
    }
    for (std::size_t j = 0; j < d; ++j) w[j] -= step * grad[j];
  }
  return w;
}

// Solves A w = b for symmetric positive-definite A via Cholesky.
std::vector<double> spd_solve(std::vector<double> a, std::vector<double> b, std::size_t d) {
  for (std::size_t j = 0; j < d; ++j) {
    double diag = a[j * d + j];
    for (std::size_t k = 0; k < j; ++k) diag -= a[j * d + k] * a[j * d + k];
    if (!(diag > 1e-12)) {
      throw SingularityError(
          "normal equations are singular or near-singular; set l2 > 0 to regularize");
    }
    const double l_jj = std::sqrt(diag);
    a[j * d + j] = l_jj;
    for (std::size_t i = j + 1; i < d; ++i) {
      double v = a[i * d + j];
      for (std::size_t k = 0; k < j; ++k) v -= a[i * d + k] * a[j * d + k];
      a[i * d + j] = v / l_jj;
    }
  }
  // Forward then back substitution.
  for (std::size_t i = 0; i < d; ++i) {
    double v = b[i];
    for (std::size_t k = 0; k < i; ++k) v -= a[i * d + k] * b[k];
    b[i] = v / a[i * d + i];
  }
  for (std::size_t i = d; i-- > 0;) {
    double v = b[i];
    for (std::size_t k = i + 1; k < d; ++k) v -= a[k * d + i] * b[k];
    b[i] = v / a[i * d + i];
  }
  return b;
}

std::vector<double> ridge(const Design& design, double l2) {
  const std::size_t n = design.n;
  const std::size_t d = design.d;
  std::vector<double> a(d * d, 0.0);
  std::vector<double> b(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double xij = design.at(i, j);
      if (xij == 0.0) continue;
      b[j] += xij * design.y[i];
      for (std::size_t k = 0; k <= j; ++k) {
        a[j * d + k] += xij * design.at(i, k);
      }
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < d; ++j) {
    b[j] *= inv_n;
    for (std::size_t k = 0; k <= j; ++k) {
      a[j * d + k] *= inv_n;
      a[k * d + j] = a[j * d + k];
    }
    a[j * d + j] += l2;
  }
  return spd_solve(std::move(a), std::move(b), d);
}

}  // namespace

FeatureMatrix features_from_items(const std::vector<ItemMeta>& items) {
  std::set<std::string> names;
  for (const ItemMeta& item : items) {
    for (const std::string& tag : item.tags) names.insert(tag);
  }
  FeatureMatrix features;
  features.feature_names.assign(names.begin(), names.end());
  std::unordered_map<std::string, std::size_t> column;
  column.reserve(features.feature_names.size());
  for (std::size_t j = 0; j < features.feature_names.size(); ++j) {
    column.emplace(features.feature_names[j], j);
  }
  features.item_ids.reserve(items.size());
  features.indicators.reserve(items.size());
  for (const ItemMeta& item : items) {
    features.item_ids.push_back(item.id);
    std::vector<std::uint8_t> row(features.feature_names.size(), 0);
    for (const std::string& tag : item.tags) row[column.at(tag)] = 1;
    features.indicators.push_back(std::move(row));
  }
  return features;
}

AttributionResult fit_attribution(const FeatureMatrix& features,
                                  const std::vector<ItemScore>& scores, AttributionMode mode,
                                  double l2, std::uint64_t /*seed*/) {
  if (!(l2 >= 0.0) || !std::isfinite(l2)) {
    throw InvalidArgumentError("fit_attribution: l2 must be finite and >= 0");
  }
  if (features.item_ids.empty()) {
    throw EmptyInputError("fit_attribution: no items");
  }
  if (features.feature_names.empty()) {
    throw InvalidArgumentError("fit_attribution: no features");
  }
  const Design design = build_design(features, scores);

  AttributionResult result;
  result.mode = mode;
  result.regularization_strength = l2;

  std::vector<double> w;
  if (mode == AttributionMode::LogisticAboveMedian) {
    const double med = median(design.y);
    std::vector<double> labels(design.n);
    std::size_t positives = 0;
    for (std::size_t i = 0; i < design.n; ++i) {
      labels[i] = design.y[i] > med ? 1.0 : 0.0;
      positives += labels[i] > 0.5 ? 1 : 0;
    }
    if (positives == 0 || positives == design.n) {
      throw DegenerateTargetError(
          "fit_attribution: all items fall on one side of the median split");
    }
    w = logistic_gd(design, labels, l2, result.iterations, result.converged);
  } else {
    w = ridge(design, l2);
    result.iterations = 0;
    result.converged = true;
  }

  result.intercept = w[0];
  for (std::size_t j = 0; j < features.feature_names.size(); ++j) {
    result.coefficients[features.feature_names[j]] = w[1 + j];
  }
  return result;
}

}  // namespace advscore
