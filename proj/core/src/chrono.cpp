#include <advscore/chrono.hpp>

#include <algorithm>
#include <unordered_set>

namespace advscore {

namespace {

void check_years(const std::vector<int>& years) {
  if (years.empty()) {
    throw InvalidArgumentError("chrono: year list is empty");
  }
  for (std::size_t i = 1; i < years.size(); ++i) {
    if (years[i] <= years[i - 1]) {
      throw InvalidArgumentError("chrono: years must be strictly increasing");
    }
  }
}

std::vector<std::string> eligible_models(const ResponseMatrix& matrix, int year) {
  std::vector<std::string> ids;
  for (const Subject& s : matrix.subjects) {
    if (s.kind == PoolKind::Model && *s.year_introduced <= year) {
      ids.push_back(s.id);
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

// Sub-matrix with all humans plus the given models; subjects and items
// left without any record are pruned.
ResponseMatrix year_slice(const ResponseMatrix& matrix, const std::vector<std::string>& models) {
  std::unordered_set<std::string> keep(models.begin(), models.end());
  for (const Subject& s : matrix.subjects) {
    if (s.kind == PoolKind::Human) keep.insert(s.id);
  }

  ResponseMatrix slice;
  std::unordered_set<std::string> touched_subjects;
  std::unordered_set<std::string> touched_items;
  for (const ResponseRecord& r : matrix.records) {
    if (!keep.count(r.subject_id)) continue;
    slice.records.push_back(r);
    touched_subjects.insert(r.subject_id);
    touched_items.insert(r.item_id);
  }
  for (const Subject& s : matrix.subjects) {
    if (touched_subjects.count(s.id)) slice.subjects.push_back(s);
  }
  for (const ItemMeta& item : matrix.items) {
    if (touched_items.count(item.id)) slice.items.push_back(item);
  }
  return slice;
}

}  // namespace

ChronoSeries chrono_advscore(const ResponseMatrix& matrix, const FitConfig& fit_config,
                             const ScoreOptions& score_options, const ChronoOptions& options,
                             const IrtParameters* prefit) {
  check_years(options.years);
  validate_fit_config(fit_config);
  bool any_model = false;
  for (const Subject& s : matrix.subjects) {
    if (s.kind != PoolKind::Model) continue;
    any_model = true;
    if (!s.year_introduced) {
      throw InvalidArgumentError("chrono: model '" + s.id + "' has no year_introduced");
    }
  }
  if (!any_model) {
    throw InvalidArgumentError("chrono: matrix has no model subjects");
  }

  ChronoSeries series;
  series.dataset_id = options.dataset_id;
  series.mode = options.mode;

  if (options.mode == ChronoMode::Refit) {
    for (int year : options.years) {
      std::vector<std::string> models = eligible_models(matrix, year);
      if (models.empty()) {
        series.skipped_years.push_back(year);
        continue;
      }
      const ResponseMatrix slice = year_slice(matrix, models);
      slice.validate();
      const IrtParameters params = fit(slice, fit_config);
      const DatasetReport report = score_dataset(slice, params, score_options);
      series.points.push_back({year, report.dataset_advscore, std::move(models)});
    }
    return series;
  }

  // FixedParams: one full fit; per year only the model group moves.
  IrtParameters fitted;
  if (prefit != nullptr) {
    validate_params_for(*prefit, matrix);
    fitted = *prefit;
  } else {
    fitted = fit(matrix, fit_config);
  }

  const SkilledGroup humans =
      select_group(fitted, matrix.subjects, PoolKind::Human, score_options.k_skilled);
  SkilledGroup delta_group;
  if (score_options.delta_policy == DeltaPolicy::PreferExperts) {
    if (auto experts = expert_group(fitted, matrix.subjects)) {
      delta_group = *std::move(experts);
    } else {
      delta_group = select_group(fitted, matrix.subjects, PoolKind::Human, 1.0);
    }
  } else {
    delta_group = select_group(fitted, matrix.subjects, PoolKind::Human, 1.0);
  }

  // Per-item ambiguity and discriminability do not depend on the year.
  std::vector<std::string> item_ids;
  item_ids.reserve(matrix.items.size());
  for (const ItemMeta& item : matrix.items) item_ids.push_back(item.id);
  std::sort(item_ids.begin(), item_ids.end());

  struct FixedPart {
    ItemParams item;
    double delta;
    double kappa_value;
  };
  std::vector<FixedPart> fixed;
  fixed.reserve(item_ids.size());
  for (const std::string& id : item_ids) {
    const ItemParams item{fitted.difficulties.at(id), fitted.discriminations.at(id)};
    fixed.push_back({item, ambiguity(item, delta_group, fitted), kappa(item, score_options.quadrature)});
  }

  for (int year : options.years) {
    std::vector<std::string> models = eligible_models(matrix, year);
    if (models.empty()) {
      series.skipped_years.push_back(year);
      continue;
    }
    std::vector<Subject> year_models;
    std::unordered_set<std::string> eligible(models.begin(), models.end());
    for (const Subject& s : matrix.subjects) {
      if (s.kind == PoolKind::Model && eligible.count(s.id)) year_models.push_back(s);
    }
    const SkilledGroup model_group =
        select_group(fitted, year_models, PoolKind::Model, score_options.k_skilled);

    double sum = 0.0;
    for (const FixedPart& part : fixed) {
      const double mu = margin(part.item, humans.representative_skill,
                               model_group.representative_skill);
      sum += item_advscore(mu, part.delta, part.kappa_value);
    }
    series.points.push_back(
        {year, sum / static_cast<double>(fixed.size()), std::move(models)});
  }
  return series;
}

}  // namespace advscore
