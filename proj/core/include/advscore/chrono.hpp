#pragma once

#include <string>
#include <vector>

#include <advscore/fit.hpp>
#include <advscore/score.hpp>

namespace advscore {

enum class ChronoMode {
  Refit,        // refit the IRT model on each cumulative year slice (same seed)
  FixedParams,  // one fit on the full matrix; only the model groups change per year
};

struct ChronoPoint {
  int year = 0;
  double advscore = 0.0;
  std::vector<std::string> model_ids;  // cumulative model pool, sorted
};

// Dataset AdvScore recomputed against the models available up to each year.
struct ChronoSeries {
  std::string dataset_id;
  ChronoMode mode = ChronoMode::Refit;
  std::vector<ChronoPoint> points;   // strictly increasing years
  std::vector<int> skipped_years;    // years whose model pool was empty
};

struct ChronoOptions {
  std::vector<int> years;  // nonempty, strictly increasing
  ChronoMode mode = ChronoMode::Refit;
  std::string dataset_id = "dataset";
};

// For each year, restricts the model pool to models introduced by then
// (humans always stay), rescores, and records the dataset AdvScore. Refit
// mode refits on each slice (records of excluded models removed; subjects
// and items left without records are pruned from the slice). FixedParams
// mode reuses one full fit -- `prefit` when given, otherwise fitted here --
// and only re-derives the model group per year.
//
// Throws InvalidArgumentError when a model lacks year_introduced or the
// year list is empty/unsorted.
ChronoSeries chrono_advscore(const ResponseMatrix& matrix, const FitConfig& fit_config,
                             const ScoreOptions& score_options, const ChronoOptions& options,
                             const IrtParameters* prefit = nullptr);

}  // namespace advscore
