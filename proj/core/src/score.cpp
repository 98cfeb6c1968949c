#include <advscore/score.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "parallel.hpp"

namespace advscore {

namespace {

ItemParams item_params_for(const IrtParameters& params, const std::string& item_id) {
  const auto theta = params.difficulties.find(item_id);
  const auto gamma = params.discriminations.find(item_id);
  if (theta == params.difficulties.end() || gamma == params.discriminations.end()) {
    throw ConsistencyError("no fitted parameters for item '" + item_id + "'");
  }
  return {theta->second, gamma->second};
}

SkilledGroup resolve_delta_group(const ResponseMatrix& matrix, const IrtParameters& params,
                                 DeltaPolicy policy) {
  if (policy == DeltaPolicy::PreferExperts) {
    if (auto experts = expert_group(params, matrix.subjects)) {
      return *std::move(experts);
    }
  }
  return select_group(params, matrix.subjects, PoolKind::Human, 1.0);
}

struct QsrCounts {
  int human_correct = 0;
  int human_total = 0;
  int model_correct = 0;
  int model_total = 0;
};

}  // namespace

double margin(const ItemParams& item, double human_rep, double model_rep) {
  return static_cast<double>(p_correct(human_rep, item)) -
         static_cast<double>(p_correct(model_rep, item));
}

double mean_abs_deviation(const std::vector<double>& values) {
  if (values.empty()) {
    throw InvalidArgumentError("mean_abs_deviation: empty value list");
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double dev = 0.0;
  for (double v : values) dev += std::abs(v - mean);
  return dev / static_cast<double>(values.size());
}

double ambiguity(const ItemParams& item, const SkilledGroup& delta_group,
                 const IrtParameters& params) {
  if (delta_group.member_ids.empty()) {
    throw EmptyPoolError("ambiguity: delta group has no members");
  }
  std::vector<double> probs;
  probs.reserve(delta_group.member_ids.size());
  for (const std::string& id : delta_group.member_ids) {
    const auto it = params.skills.find(id);
    if (it == params.skills.end()) {
      throw ConsistencyError("no fitted skill for group member '" + id + "'");
    }
    probs.push_back(p_correct(it->second, item));
  }
  return mean_abs_deviation(probs);
}

double item_advscore(double margin, double ambiguity, double kappa) {
  if (!std::isfinite(margin)) {
    throw InvalidArgumentError("item_advscore: margin must be finite");
  }
  if (!std::isfinite(ambiguity) || ambiguity < 0.0) {
    throw InvalidArgumentError("item_advscore: ambiguity must be >= 0");
  }
  if (!std::isfinite(kappa) || kappa < 0.0 || kappa >= 1.0) {
    throw InvalidArgumentError("item_advscore: kappa must lie in [0,1)");
  }
  return margin / (1.0 + ambiguity) * (1.0 + kappa);
}

std::optional<double> qsr(const ResponseMatrix& matrix, const std::string& item_id,
                          PoolKind kind) {
  bool known = false;
  for (const ItemMeta& item : matrix.items) {
    if (item.id == item_id) {
      known = true;
      break;
    }
  }
  if (!known) {
    throw ReferenceError("qsr: unknown item '" + item_id + "'");
  }
  std::unordered_map<std::string, PoolKind> kind_of;
  kind_of.reserve(matrix.subjects.size());
  for (const Subject& s : matrix.subjects) kind_of.emplace(s.id, s.kind);

  int correct = 0;
  int total = 0;
  for (const ResponseRecord& r : matrix.records) {
    if (r.item_id != item_id) continue;
    const auto it = kind_of.find(r.subject_id);
    if (it == kind_of.end() || it->second != kind) continue;
    ++total;
    correct += r.correct ? 1 : 0;
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(total);
}

DatasetReport score_dataset(const ResponseMatrix& matrix, const IrtParameters& params,
                            const ScoreOptions& options) {
  validate_params_for(params, matrix);
  validate_quadrature(options.quadrature);

  DatasetReport report;
  report.skilled_humans = select_group(params, matrix.subjects, PoolKind::Human, options.k_skilled);
  report.skilled_models = select_group(params, matrix.subjects, PoolKind::Model, options.k_skilled);
  report.delta_group = resolve_delta_group(matrix, params, options.delta_policy);

  // One pass over the records for both pools' QSR tallies.
  std::unordered_map<std::string, PoolKind> kind_of;
  kind_of.reserve(matrix.subjects.size());
  for (const Subject& s : matrix.subjects) kind_of.emplace(s.id, s.kind);
  std::unordered_map<std::string, QsrCounts> counts;
  counts.reserve(matrix.items.size());
  for (const ResponseRecord& r : matrix.records) {
    QsrCounts& c = counts[r.item_id];
    if (kind_of.at(r.subject_id) == PoolKind::Human) {
      ++c.human_total;
      c.human_correct += r.correct ? 1 : 0;
    } else {
      ++c.model_total;
      c.model_correct += r.correct ? 1 : 0;
    }
  }

  // Items are scored and aggregated in sorted-id order, so the report is
  // identical whatever order the matrix declared them in.
  std::vector<const ItemMeta*> sorted_items;
  sorted_items.reserve(matrix.items.size());
  for (const ItemMeta& item : matrix.items) sorted_items.push_back(&item);
  std::sort(sorted_items.begin(), sorted_items.end(),
            [](const ItemMeta* a, const ItemMeta* b) { return a->id < b->id; });

  const double human_rep = report.skilled_humans.representative_skill;
  const double model_rep = report.skilled_models.representative_skill;

  report.item_scores.resize(sorted_items.size());
  detail::for_each_chunk(
      sorted_items.size(), 64, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
          const ItemMeta& meta = *sorted_items[k];
          const ItemParams item = item_params_for(params, meta.id);
          ItemScore score;
          score.item_id = meta.id;
          score.margin = margin(item, human_rep, model_rep);
          score.ambiguity = ambiguity(item, report.delta_group, params);
          score.discriminability = kappa(item, options.quadrature);
          score.advscore = item_advscore(score.margin, score.ambiguity, score.discriminability);
          if (const auto it = counts.find(meta.id); it != counts.end()) {
            if (it->second.human_total > 0) {
              score.human_qsr = static_cast<double>(it->second.human_correct) /
                                static_cast<double>(it->second.human_total);
            }
            if (it->second.model_total > 0) {
              score.model_qsr = static_cast<double>(it->second.model_correct) /
                                static_cast<double>(it->second.model_total);
            }
          }
          report.item_scores[k] = std::move(score);
        }
      });

  if (!report.item_scores.empty()) {
    double sum_adv = 0.0;
    double sum_margin = 0.0;
    double sum_delta = 0.0;
    double sum_kappa = 0.0;
    for (const ItemScore& s : report.item_scores) {
      sum_adv += s.advscore;
      sum_margin += s.margin;
      sum_delta += s.ambiguity;
      sum_kappa += s.discriminability;
    }
    const double n = static_cast<double>(report.item_scores.size());
    report.dataset_advscore = sum_adv / n;
    report.dataset_margin = sum_margin / n;
    report.dataset_ambiguity = sum_delta / n;
    report.dataset_kappa = sum_kappa / n;
  }

  report.curves = skill_profile_curves(matrix, params, report.skilled_humans,
                                       report.skilled_models, options.curves);
  return report;
}

namespace {

// Histogram of member skills evaluated on the grid, normalized so the
// trapezoid-rule integral over the grid is exactly 1.
std::vector<double> group_density(const SkilledGroup& group, const IrtParameters& params,
                                  const std::vector<double>& grid, const CurveConfig& config) {
  const double lo = config.theta_min;
  const double hi = config.theta_max;
  const double bin_width = (hi - lo) / config.density_bins;

  std::vector<double> bin_counts(config.density_bins, 0.0);
  for (const std::string& id : group.member_ids) {
    const auto it = params.skills.find(id);
    if (it == params.skills.end()) {
      throw ConsistencyError("no fitted skill for group member '" + id + "'");
    }
    const double skill = std::clamp(it->second, lo, hi);  // outliers land in the end bins
    int bin = static_cast<int>((skill - lo) / bin_width);
    bin = std::clamp(bin, 0, config.density_bins - 1);
    bin_counts[bin] += 1.0;
  }

  std::vector<double> density(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    int bin = static_cast<int>((grid[i] - lo) / bin_width);
    bin = std::clamp(bin, 0, config.density_bins - 1);
    density[i] = bin_counts[bin];
  }

  const double h = (hi - lo) / static_cast<double>(grid.size() - 1);
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    integral += 0.5 * h * (density[i] + density[i + 1]);
  }
  if (!(integral > 0.0)) {
    throw ConfigError("density grid too coarse for the configured bins");
  }
  for (double& d : density) d /= integral;
  return density;
}

}  // namespace

CurveBundle skill_profile_curves(const ResponseMatrix& matrix, const IrtParameters& params,
                                 const SkilledGroup& humans, const SkilledGroup& models,
                                 const CurveConfig& config) {
  if (config.grid_points < 2 || config.density_bins < 1 ||
      !(config.theta_max > config.theta_min)) {
    throw ConfigError("invalid curve grid configuration");
  }

  CurveBundle curves;
  curves.theta_grid.resize(config.grid_points);
  const double step = (config.theta_max - config.theta_min) / (config.grid_points - 1);
  for (int i = 0; i < config.grid_points; ++i) {
    curves.theta_grid[i] = config.theta_min + i * step;
  }

  curves.human_skill_density = group_density(humans, params, curves.theta_grid, config);
  curves.model_skill_density = group_density(models, params, curves.theta_grid, config);

  std::vector<ItemParams> items;
  items.reserve(matrix.items.size());
  {
    std::vector<std::string> ids;
    ids.reserve(matrix.items.size());
    for (const ItemMeta& item : matrix.items) ids.push_back(item.id);
    std::sort(ids.begin(), ids.end());
    for (const std::string& id : ids) items.push_back(item_params_for(params, id));
  }

  curves.mean_correctness.assign(curves.theta_grid.size(), 0.0);
  curves.mean_iif.assign(curves.theta_grid.size(), 0.0);
  if (!items.empty()) {
    detail::for_each_chunk(
        curves.theta_grid.size(), 64, [&](std::size_t, std::size_t begin, std::size_t end) {
          for (std::size_t g = begin; g < end; ++g) {
            double sum_p = 0.0;
            double sum_info = 0.0;
            for (const ItemParams& item : items) {
              const double p = p_correct(curves.theta_grid[g], item);
              sum_p += p;
              sum_info += item.discrimination * item.discrimination * p * (1.0 - p);
            }
            curves.mean_correctness[g] = sum_p / static_cast<double>(items.size());
            curves.mean_iif[g] = sum_info / static_cast<double>(items.size());
          }
        });
  }
  return curves;
}

}  // namespace advscore
