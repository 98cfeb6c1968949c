#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <advscore/types.hpp>

namespace advscore {

// MAP training settings. Defaults follow the usual 2PL conventions: the
// Gamma(2,1) prior puts the discrimination mode at 1.
struct FitConfig {
  double learning_rate = 0.05;
  int max_epochs = 2000;
  int patience = 20;
  double holdout_fraction = 0.1;  // in [0, 0.5); 0 disables early stopping
  double gamma_prior_shape = 2.0;
  double gamma_prior_scale = 1.0;
  std::uint64_t seed = 0;
  double tolerance = 1e-6;  // training-loss plateau threshold when no holdout
};

// Throws ConfigError when any bound is violated.
void validate_fit_config(const FitConfig& config);

// Fitted latent parameters, keyed by subject/item id.
struct IrtParameters {
  std::map<std::string, double> skills;           // beta per subject
  std::map<std::string, double> difficulties;     // theta per item
  std::map<std::string, double> discriminations;  // gamma per item, > 0
  double final_loss = 0.0;
  int epochs_run = 0;
};

// Throws ConsistencyError unless the parameter key sets match the matrix's
// subjects and items exactly, and InvalidArgumentError on non-finite values
// or nonpositive discriminations.
void validate_params_for(const IrtParameters& params, const ResponseMatrix& matrix);

// Gradient of neg_log_posterior. Discriminations are differentiated in log
// space (with respect to ln gamma), matching the fit's parameterization.
struct ParameterGradient {
  std::map<std::string, double> skills;
  std::map<std::string, double> difficulties;
  std::map<std::string, double> log_discriminations;
};

// Negative log posterior: binary cross-entropy between each observed
// response and p_correct(beta_i, item_j), plus standard-normal penalties
// beta^2/2 and theta^2/2, plus the Gamma penalty
// gamma/scale - (shape-1) * ln(gamma) per item. Constants are dropped.
double neg_log_posterior(const IrtParameters& params, const ResponseMatrix& matrix,
                         const FitConfig& config);

// Exact analytic gradient of neg_log_posterior.
ParameterGradient gradient(const IrtParameters& params, const ResponseMatrix& matrix,
                           const FitConfig& config);

// Full-batch Adam on the MAP objective. Skills and difficulties are
// initialized from the standard normal, log-discriminations from the log of
// Gamma(shape, scale) draws, all seeded. With a positive holdout fraction a
// seeded record-level split is held out, holdout NLL is evaluated every
// epoch, and the best-epoch parameters are returned once `patience` epochs
// pass without improvement. Deterministic for a fixed seed and record
// multiset: records are processed in a canonical order, so permuting the
// input changes nothing.
//
// Throws EmptyInputError on a matrix without records and NumericalError
// (naming the epoch) if the loss turns non-finite.
IrtParameters fit(const ResponseMatrix& matrix, const FitConfig& config);

// Mean binary cross-entropy of the given records under the fitted
// parameters; no penalty terms. Throws InvalidArgumentError on an empty
// record list and ConsistencyError on ids missing from the parameters.
double holdout_nll(const IrtParameters& params, const std::vector<ResponseRecord>& heldout);

}  // namespace advscore
