#include <advscore/fit.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include <advscore/rng.hpp>

#include "parallel.hpp"

namespace advscore {

namespace {

constexpr std::size_t kGradChunks = 64;
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

// ln(1 + e^x) without overflow.
double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct Rec {
  int subject;
  int item;
  double correct;
};

// Index-based view of a matrix. Records are held in a canonical order
// (sorted by subject id, then item id) so that every reduction below is
// independent of the input record permutation.
struct Indexed {
  std::vector<std::string> subject_ids;  // declaration order
  std::vector<std::string> item_ids;
  std::vector<Rec> recs;

  std::size_t n_subjects() const { return subject_ids.size(); }
  std::size_t n_items() const { return item_ids.size(); }
  std::size_t dim() const { return n_subjects() + 2 * n_items(); }
};

Indexed build_index(const ResponseMatrix& matrix) {
  Indexed ix;
  ix.subject_ids.reserve(matrix.subjects.size());
  std::unordered_map<std::string, int> sidx;
  sidx.reserve(matrix.subjects.size());
  for (const Subject& s : matrix.subjects) {
    sidx.emplace(s.id, static_cast<int>(ix.subject_ids.size()));
    ix.subject_ids.push_back(s.id);
  }
  std::unordered_map<std::string, int> iidx;
  iidx.reserve(matrix.items.size());
  for (const ItemMeta& item : matrix.items) {
    iidx.emplace(item.id, static_cast<int>(ix.item_ids.size()));
    ix.item_ids.push_back(item.id);
  }

  std::vector<std::size_t> order(matrix.records.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const ResponseRecord& ra = matrix.records[a];
    const ResponseRecord& rb = matrix.records[b];
    if (ra.subject_id != rb.subject_id) return ra.subject_id < rb.subject_id;
    return ra.item_id < rb.item_id;
  });

  ix.recs.reserve(matrix.records.size());
  for (std::size_t pos : order) {
    const ResponseRecord& r = matrix.records[pos];
    const auto s = sidx.find(r.subject_id);
    const auto i = iidx.find(r.item_id);
    if (s == sidx.end()) {
      throw ReferenceError("record references unknown subject '" + r.subject_id + "'");
    }
    if (i == iidx.end()) {
      throw ReferenceError("record references unknown item '" + r.item_id + "'");
    }
    ix.recs.push_back({s->second, i->second, r.correct ? 1.0 : 0.0});
  }
  return ix;
}

// Parameter vector layout: [beta_0..beta_S) [theta_0..theta_I) [g_0..g_I)
// with g = ln(gamma).
struct Blocks {
  const double* beta;
  const double* theta;
  const double* g;
};

Blocks blocks(const std::vector<double>& x, const Indexed& ix) {
  return {x.data(), x.data() + ix.n_subjects(), x.data() + ix.n_subjects() + ix.n_items()};
}

double data_loss(const Indexed& ix, const std::vector<Rec>& recs, const std::vector<double>& x) {
  const Blocks b = blocks(x, ix);
  std::vector<double> partial(kGradChunks, 0.0);
  detail::for_each_chunk(recs.size(), kGradChunks,
                         [&](std::size_t chunk, std::size_t begin, std::size_t end) {
                           double acc = 0.0;
                           for (std::size_t k = begin; k < end; ++k) {
                             const Rec& r = recs[k];
                             const double gamma = std::exp(b.g[r.item]);
                             const double z = gamma * (b.beta[r.subject] - b.theta[r.item]);
                             acc += softplus(z) - r.correct * z;
                           }
                           partial[chunk] = acc;
                         });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

double penalty(const Indexed& ix, const std::vector<double>& x, const FitConfig& config) {
  const Blocks b = blocks(x, ix);
  double total = 0.0;
  for (std::size_t i = 0; i < ix.n_subjects(); ++i) {
    total += 0.5 * b.beta[i] * b.beta[i];
  }
  for (std::size_t j = 0; j < ix.n_items(); ++j) {
    total += 0.5 * b.theta[j] * b.theta[j];
    // Gamma prior on gamma = e^g, constants dropped.
    total += std::exp(b.g[j]) / config.gamma_prior_scale - (config.gamma_prior_shape - 1.0) * b.g[j];
  }
  return total;
}

// Full objective gradient into `grad` (resized and overwritten).
void objective_gradient(const Indexed& ix, const std::vector<Rec>& recs,
                        const std::vector<double>& x, const FitConfig& config,
                        std::vector<double>& grad, std::vector<double>& scratch) {
  const Blocks b = blocks(x, ix);
  const std::size_t dim = ix.dim();
  grad.assign(dim, 0.0);
  scratch.assign(kGradChunks * dim, 0.0);

  detail::for_each_chunk(recs.size(), kGradChunks,
                         [&](std::size_t chunk, std::size_t begin, std::size_t end) {
                           double* local = scratch.data() + chunk * dim;
                           const std::size_t theta_off = ix.n_subjects();
                           const std::size_t g_off = theta_off + ix.n_items();
                           for (std::size_t k = begin; k < end; ++k) {
                             const Rec& r = recs[k];
                             const double gamma = std::exp(b.g[r.item]);
                             const double z = gamma * (b.beta[r.subject] - b.theta[r.item]);
                             const double d = stable_sigmoid(z) - r.correct;
                             local[r.subject] += gamma * d;
                             local[theta_off + r.item] -= gamma * d;
                             local[g_off + r.item] += z * d;
                           }
                         });
  // Merge in chunk order: bit-reproducible for any thread count.
  for (std::size_t c = 0; c < kGradChunks; ++c) {
    const double* local = scratch.data() + c * dim;
    for (std::size_t k = 0; k < dim; ++k) grad[k] += local[k];
  }

  for (std::size_t i = 0; i < ix.n_subjects(); ++i) {
    grad[i] += b.beta[i];
  }
  const std::size_t theta_off = ix.n_subjects();
  const std::size_t g_off = theta_off + ix.n_items();
  for (std::size_t j = 0; j < ix.n_items(); ++j) {
    grad[theta_off + j] += b.theta[j];
    grad[g_off + j] += std::exp(b.g[j]) / config.gamma_prior_scale - (config.gamma_prior_shape - 1.0);
  }
}

double mean_bce(const Indexed& ix, const std::vector<Rec>& recs, const std::vector<double>& x) {
  const Blocks b = blocks(x, ix);
  double total = 0.0;
  for (const Rec& r : recs) {
    const double gamma = std::exp(b.g[r.item]);
    const double z = gamma * (b.beta[r.subject] - b.theta[r.item]);
    total += softplus(z) - r.correct * z;
  }
  return total / static_cast<double>(recs.size());
}

std::vector<double> flatten(const IrtParameters& params, const Indexed& ix) {
  std::vector<double> x(ix.dim());
  for (std::size_t i = 0; i < ix.n_subjects(); ++i) {
    x[i] = params.skills.at(ix.subject_ids[i]);
  }
  const std::size_t theta_off = ix.n_subjects();
  const std::size_t g_off = theta_off + ix.n_items();
  for (std::size_t j = 0; j < ix.n_items(); ++j) {
    x[theta_off + j] = params.difficulties.at(ix.item_ids[j]);
    const double gamma = params.discriminations.at(ix.item_ids[j]);
    x[g_off + j] = std::log(gamma);
  }
  return x;
}

void check_params_shape(const IrtParameters& params, const Indexed& ix) {
  if (params.skills.size() != ix.n_subjects() || params.difficulties.size() != ix.n_items() ||
      params.discriminations.size() != ix.n_items()) {
    throw ConsistencyError("parameter key sets do not match the matrix");
  }
  for (const std::string& id : ix.subject_ids) {
    if (!params.skills.count(id)) {
      throw ConsistencyError("missing skill for subject '" + id + "'");
    }
  }
  for (const std::string& id : ix.item_ids) {
    if (!params.difficulties.count(id)) {
      throw ConsistencyError("missing difficulty for item '" + id + "'");
    }
    if (!params.discriminations.count(id)) {
      throw ConsistencyError("missing discrimination for item '" + id + "'");
    }
  }
}

void check_params_values(const IrtParameters& params) {
  for (const auto& [id, v] : params.skills) {
    if (!std::isfinite(v)) throw InvalidArgumentError("non-finite skill for '" + id + "'");
  }
  for (const auto& [id, v] : params.difficulties) {
    if (!std::isfinite(v)) throw InvalidArgumentError("non-finite difficulty for '" + id + "'");
  }
  for (const auto& [id, v] : params.discriminations) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw InvalidArgumentError("discrimination for '" + id + "' must be finite and > 0");
    }
  }
}

}  // namespace

void validate_fit_config(const FitConfig& config) {
  if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate)) {
    throw ConfigError("learning_rate must be finite and > 0");
  }
  if (config.max_epochs <= 0) throw ConfigError("max_epochs must be positive");
  if (config.patience <= 0) throw ConfigError("patience must be positive");
  if (!(config.holdout_fraction >= 0.0 && config.holdout_fraction < 0.5)) {
    throw ConfigError("holdout_fraction must lie in [0, 0.5)");
  }
  if (!(config.gamma_prior_shape > 0.0) || !std::isfinite(config.gamma_prior_shape)) {
    throw ConfigError("gamma_prior_shape must be finite and > 0");
  }
  if (!(config.gamma_prior_scale > 0.0) || !std::isfinite(config.gamma_prior_scale)) {
    throw ConfigError("gamma_prior_scale must be finite and > 0");
  }
  if (!(config.tolerance > 0.0) || !std::isfinite(config.tolerance)) {
    throw ConfigError("tolerance must be finite and > 0");
  }
}

void validate_params_for(const IrtParameters& params, const ResponseMatrix& matrix) {
  const Indexed ix = build_index(matrix);
  check_params_shape(params, ix);
  check_params_values(params);
}

double neg_log_posterior(const IrtParameters& params, const ResponseMatrix& matrix,
                         const FitConfig& config) {
  validate_fit_config(config);
  const Indexed ix = build_index(matrix);
  check_params_shape(params, ix);
  check_params_values(params);
  const std::vector<double> x = flatten(params, ix);
  return data_loss(ix, ix.recs, x) + penalty(ix, x, config);
}

ParameterGradient gradient(const IrtParameters& params, const ResponseMatrix& matrix,
                           const FitConfig& config) {
  validate_fit_config(config);
  const Indexed ix = build_index(matrix);
  check_params_shape(params, ix);
  check_params_values(params);
  const std::vector<double> x = flatten(params, ix);

  std::vector<double> grad;
  std::vector<double> scratch;
  objective_gradient(ix, ix.recs, x, config, grad, scratch);

  ParameterGradient out;
  for (std::size_t i = 0; i < ix.n_subjects(); ++i) {
    out.skills[ix.subject_ids[i]] = grad[i];
  }
  const std::size_t theta_off = ix.n_subjects();
  const std::size_t g_off = theta_off + ix.n_items();
  for (std::size_t j = 0; j < ix.n_items(); ++j) {
    out.difficulties[ix.item_ids[j]] = grad[theta_off + j];
    out.log_discriminations[ix.item_ids[j]] = grad[g_off + j];
  }
  return out;
}

IrtParameters fit(const ResponseMatrix& matrix, const FitConfig& config) {
  validate_fit_config(config);
  const Indexed ix = build_index(matrix);
  if (ix.recs.empty()) {
    throw EmptyInputError("cannot fit a matrix with zero records");
  }

  // Initialization draws follow declaration order: all skills, then all
  // difficulties, then all discriminations.
  Rng init_rng(substream_seed(config.seed, streams::kFitInit));
  std::vector<double> x(ix.dim());
  for (std::size_t i = 0; i < ix.n_subjects(); ++i) {
    x[i] = init_rng.normal();
  }
  const std::size_t theta_off = ix.n_subjects();
  const std::size_t g_off = theta_off + ix.n_items();
  for (std::size_t j = 0; j < ix.n_items(); ++j) {
    x[theta_off + j] = init_rng.normal();
  }
  for (std::size_t j = 0; j < ix.n_items(); ++j) {
    x[g_off + j] = std::log(init_rng.gamma(config.gamma_prior_shape, config.gamma_prior_scale));
  }

  // Record-level holdout split over the canonical record order.
  std::vector<Rec> train;
  std::vector<Rec> holdout;
  const std::size_t n_holdout =
      static_cast<std::size_t>(config.holdout_fraction * static_cast<double>(ix.recs.size()));
  if (n_holdout > 0) {
    std::vector<std::size_t> order(ix.recs.size());
    std::iota(order.begin(), order.end(), 0);
    Rng split_rng(substream_seed(config.seed, streams::kFitSplit));
    for (std::size_t k = order.size() - 1; k > 0; --k) {
      const std::size_t j = static_cast<std::size_t>(split_rng.uniform() * static_cast<double>(k + 1));
      std::swap(order[k], order[j]);
    }
    std::vector<char> held(ix.recs.size(), 0);
    for (std::size_t k = 0; k < n_holdout; ++k) held[order[k]] = 1;
    train.reserve(ix.recs.size() - n_holdout);
    holdout.reserve(n_holdout);
    for (std::size_t k = 0; k < ix.recs.size(); ++k) {
      (held[k] ? holdout : train).push_back(ix.recs[k]);
    }
  } else {
    train = ix.recs;
  }
  const bool early_stopping = !holdout.empty();

  std::vector<double> m(ix.dim(), 0.0);
  std::vector<double> v(ix.dim(), 0.0);
  std::vector<double> grad;
  std::vector<double> scratch;

  std::vector<double> best_x = x;
  double best_nll = std::numeric_limits<double>::infinity();
  int bad_epochs = 0;
  int plateau_epochs = 0;
  double prev_loss = std::numeric_limits<double>::infinity();
  int epochs_run = 0;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const double loss = data_loss(ix, train, x) + penalty(ix, x, config);
    if (!std::isfinite(loss)) {
      throw NumericalError("training loss became non-finite at epoch " + std::to_string(epoch));
    }

    objective_gradient(ix, train, x, config, grad, scratch);

    const double bc1 = 1.0 - std::pow(kAdamBeta1, epoch);
    const double bc2 = 1.0 - std::pow(kAdamBeta2, epoch);
    for (std::size_t k = 0; k < ix.dim(); ++k) {
      m[k] = kAdamBeta1 * m[k] + (1.0 - kAdamBeta1) * grad[k];
      v[k] = kAdamBeta2 * v[k] + (1.0 - kAdamBeta2) * grad[k] * grad[k];
      const double m_hat = m[k] / bc1;
      const double v_hat = v[k] / bc2;
      x[k] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + kAdamEps);
    }
    epochs_run = epoch;

    if (early_stopping) {
      const double nll = mean_bce(ix, holdout, x);
      if (!std::isfinite(nll)) {
        throw NumericalError("holdout loss became non-finite at epoch " + std::to_string(epoch));
      }
      if (nll < best_nll) {
        best_nll = nll;
        best_x = x;
        bad_epochs = 0;
      } else if (++bad_epochs >= config.patience) {
        break;
      }
    } else {
      if (prev_loss - loss < config.tolerance) {
        if (++plateau_epochs >= config.patience) break;
      } else {
        plateau_epochs = 0;
      }
      prev_loss = loss;
    }
  }

  const std::vector<double>& final_x = early_stopping ? best_x : x;

  IrtParameters out;
  for (std::size_t i = 0; i < ix.n_subjects(); ++i) {
    out.skills[ix.subject_ids[i]] = final_x[i];
  }
  for (std::size_t j = 0; j < ix.n_items(); ++j) {
    out.difficulties[ix.item_ids[j]] = final_x[theta_off + j];
    out.discriminations[ix.item_ids[j]] = std::exp(final_x[g_off + j]);
  }
  out.final_loss = data_loss(ix, ix.recs, final_x) + penalty(ix, final_x, config);
  out.epochs_run = epochs_run;
  if (!std::isfinite(out.final_loss)) {
    throw NumericalError("final loss is non-finite after epoch " + std::to_string(epochs_run));
  }
  return out;
}

double holdout_nll(const IrtParameters& params, const std::vector<ResponseRecord>& heldout) {
  if (heldout.empty()) {
    throw InvalidArgumentError("holdout_nll: record list is empty");
  }
  check_params_values(params);
  double total = 0.0;
  for (const ResponseRecord& r : heldout) {
    const auto skill = params.skills.find(r.subject_id);
    if (skill == params.skills.end()) {
      throw ConsistencyError("holdout_nll: unknown subject '" + r.subject_id + "'");
    }
    const auto theta = params.difficulties.find(r.item_id);
    const auto gamma = params.discriminations.find(r.item_id);
    if (theta == params.difficulties.end() || gamma == params.discriminations.end()) {
      throw ConsistencyError("holdout_nll: unknown item '" + r.item_id + "'");
    }
    const double z = gamma->second * (skill->second - theta->second);
    total += softplus(z) - (r.correct ? 1.0 : 0.0) * z;
  }
  return total / static_cast<double>(heldout.size());
}

}  // namespace advscore
