#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <advscore/fit.hpp>
#include <advscore/types.hpp>

namespace advscore {

// Ground-truth generator settings. Defaults match the recovery preset:
// 120 humans at mean skill +0.5, 80 models at -0.5, 200 items.
struct SynthConfig {
  int n_humans = 120;
  int n_models = 80;
  int n_items = 200;
  double human_skill_mean = 0.5;
  double model_skill_mean = -0.5;
  double skill_stddev = 1.0;
  double gamma_shape = 2.0;
  double gamma_scale = 1.0;
  double response_density = 1.0;  // in (0, 1]
  std::uint64_t seed = 0;
};

void validate_synth_config(const SynthConfig& config);

// Sampled latent truth plus the simulated response log.
struct SynthTruth {
  std::map<std::string, double> true_skills;
  std::map<std::string, double> true_difficulties;
  std::map<std::string, double> true_discriminations;
  ResponseMatrix matrix;
};

// Correlation and RMSE between generator truth and a fit, per parameter
// block.
struct RecoveryReport {
  double r_skill = 0.0;
  double r_difficulty = 0.0;
  double r_discrimination = 0.0;
  double rmse_skill = 0.0;
  double rmse_difficulty = 0.0;
  double rmse_discrimination = 0.0;
};

// Samples skills per pool from N(pool mean, stddev^2), difficulties from
// N(0,1), discriminations from Gamma(shape, scale); keeps each
// (subject, item) pair with probability response_density and draws the
// response as Bernoulli(p_correct). Bit-identical output per seed (see Rng
// for the exact sampling algorithms).
SynthTruth generate(const SynthConfig& config);

// Pearson correlations and RMSE per block. Throws ConsistencyError when
// the key sets differ.
RecoveryReport recovery_report(const SynthTruth& truth, const IrtParameters& fitted);

// Pearson correlation; NaN when either side has zero variance.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace advscore
