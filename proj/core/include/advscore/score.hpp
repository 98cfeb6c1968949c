#pragma once

#include <optional>
#include <string>
#include <vector>

#include <advscore/cohorts.hpp>
#include <advscore/fit.hpp>
#include <advscore/irt.hpp>
#include <advscore/types.hpp>

namespace advscore {

// Per-item adversarialness scores.
struct ItemScore {
  std::string item_id;
  double margin = 0.0;            // mu: skilled-human minus skilled-model probability
  double ambiguity = 0.0;         // delta: mean absolute deviation within the delta group
  double discriminability = 0.0;  // kappa
  double advscore = 0.0;          // margin / (1 + ambiguity) * (1 + discriminability)
  std::optional<double> human_qsr;  // absent when the pool never answered the item
  std::optional<double> model_qsr;
};

// Latent-scale grid for the report's curve tables. The density histograms
// use `density_bins` bins over [theta_min, theta_max] and are normalized so
// their trapezoid-rule integral over the grid is exactly 1.
struct CurveConfig {
  double theta_min = -4.0;
  double theta_max = 4.0;
  int grid_points = 201;
  int density_bins = 25;
};

struct CurveBundle {
  std::vector<double> theta_grid;
  std::vector<double> human_skill_density;
  std::vector<double> model_skill_density;
  std::vector<double> mean_correctness;  // p_correct averaged over items at each grid point
  std::vector<double> mean_iif;          // iif averaged over items
};

// How the ambiguity (delta) group is chosen.
enum class DeltaPolicy {
  PreferExperts,   // flagged experts when present, else humans at k = 1
  SkillThreshold,  // always humans at k = 1
};

struct ScoreOptions {
  double k_skilled = 0.0;  // k for the skilled human/model groups
  DeltaPolicy delta_policy = DeltaPolicy::PreferExperts;
  QuadratureConfig quadrature;
  CurveConfig curves;
};

struct DatasetReport {
  std::vector<ItemScore> item_scores;  // sorted by item id
  double dataset_advscore = 0.0;       // unweighted means over items
  double dataset_margin = 0.0;
  double dataset_ambiguity = 0.0;
  double dataset_kappa = 0.0;
  SkilledGroup skilled_humans;
  SkilledGroup skilled_models;
  SkilledGroup delta_group;
  CurveBundle curves;
};

// mu: p_correct(human_rep) - p_correct(model_rep). In (-1, 1); positive
// exactly when the human representative is the more skilled.
double margin(const ItemParams& item, double human_rep, double model_rep);

// Mean absolute deviation about the mean. Throws InvalidArgumentError on an
// empty list.
double mean_abs_deviation(const std::vector<double>& values);

// delta: mean absolute deviation of the members' correctness probabilities
// on this item. Zero for a singleton group; never exceeds 0.5.
double ambiguity(const ItemParams& item, const SkilledGroup& delta_group,
                 const IrtParameters& params);

// margin / (1 + ambiguity) * (1 + kappa). Throws InvalidArgumentError when
// ambiguity < 0 or kappa is outside [0, 1).
double item_advscore(double margin, double ambiguity, double kappa);

// Raw fraction of the pool's responses to the item that are correct.
// Returns nullopt when the pool never answered the item (absent, not 0).
std::optional<double> qsr(const ResponseMatrix& matrix, const std::string& item_id,
                          PoolKind kind);

// Full pipeline over one fitted dataset: builds the skilled groups and the
// delta group, scores every item, aggregates, and fills the curve bundle.
// Output is independent of subject and item ordering in the matrix.
DatasetReport score_dataset(const ResponseMatrix& matrix, const IrtParameters& params,
                            const ScoreOptions& options = {});

// Curve tables alone, for already-resolved groups.
CurveBundle skill_profile_curves(const ResponseMatrix& matrix, const IrtParameters& params,
                                 const SkilledGroup& humans, const SkilledGroup& models,
                                 const CurveConfig& config = {});

}  // namespace advscore
