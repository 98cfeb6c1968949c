// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <advscore/chrono.hpp>
#include <advscore/io.hpp>
#include <advscore/rng.hpp>
#include <advscore/score.hpp>
#include <advscore/synth.hpp>
#include <advscore/version.hpp>

#include "../tools/cli.hpp"
#include "temp_dir.hpp"

using namespace advscore;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] %2d. %s: %s\n", ok ? "PASS" : "FAIL", criterion, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* pattern, ...) {
  va_list args;
  va_start(args, pattern);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, pattern, args);
  va_end(args);
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

// Shared by criteria 1 and 10.
struct RecoveryRun {
  SynthTruth truth;
  RecoveryReport recovery;
  FitConfig config;
  double seconds = 0.0;
};

RecoveryRun run_recovery(std::uint64_t seed) {
  RecoveryRun run;
  SynthConfig synth;  // defaults are the recovery preset: 120/80 x 200, density 1
  synth.seed = seed;
  run.truth = generate(synth);
  run.config.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  const IrtParameters fitted = fit(run.truth.matrix, run.config);
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  run.recovery = recovery_report(run.truth, fitted);
  return run;
}

RecoveryRun criterion_1() {
  RecoveryRun run = run_recovery(7);
  const RecoveryReport& r = run.recovery;
  const bool ok = r.r_difficulty >= 0.90 && r.r_skill >= 0.90 && r.r_discrimination >= 0.75 &&
                  run.seconds <= 60.0;
  report(1, "parameter recovery (simulate --preset recovery)", ok,
         fmt("r_beta=%.4f (>=0.90) r_theta=%.4f (>=0.90) r_gamma=%.4f (>=0.75), fit %.2f s (<=60)",
             r.r_skill, r.r_difficulty, r.r_discrimination, run.seconds));
  return run;
}

// Criterion 10: emit -> load -> refit reproduces criterion 1's correlations.
void criterion_10(const RecoveryRun& run) {
  const RecoveryReport& r = run.recovery;
  try {
    TempDir dir;
    RunManifest manifest;
    manifest.version = kVersion;
    manifest.timestamp = "fixed";
    manifest.seed = 7;
    emit_synth(run.truth, manifest, dir.path);
    const ResponseMatrix loaded =
        load_matrix(dir.file("responses.csv"), dir.file("subjects.csv"), dir.file("items.csv"));
    const IrtParameters loaded_truth = load_params(dir.file("truth.json"));
    SynthTruth round_truth;
    round_truth.true_skills = loaded_truth.skills;
    round_truth.true_difficulties = loaded_truth.difficulties;
    round_truth.true_discriminations = loaded_truth.discriminations;
    round_truth.matrix = loaded;
    const IrtParameters refit = fit(loaded, run.config);
    const RecoveryReport again = recovery_report(round_truth, refit);
    const double worst =
        std::max({std::abs(again.r_skill - r.r_skill), std::abs(again.r_difficulty - r.r_difficulty),
                  std::abs(again.r_discrimination - r.r_discrimination)});
    report(10, "io round trip reproduces recovery", worst <= 1e-12,
           fmt("max |delta r| = %.3g (<= 1e-12)", worst));
  } catch (const std::exception& e) {
    report(10, "io round trip reproduces recovery", false, e.what());
  }
}

void criterion_2() {
  double worst = 0.0;
  FitConfig config;
  for (int trial = 0; trial < 20; ++trial) {
    SynthConfig synth;
    synth.n_humans = 8;
    synth.n_models = 7;
    synth.n_items = 15;
    synth.seed = 1000 + trial;
    const SynthTruth truth = generate(synth);

    Rng rng(2000 + trial);
    IrtParameters params;
    for (const Subject& s : truth.matrix.subjects) params.skills[s.id] = rng.normal();
    for (const ItemMeta& item : truth.matrix.items) {
      params.difficulties[item.id] = rng.normal();
      params.discriminations[item.id] = rng.gamma(2.0, 1.0);
    }

    const ParameterGradient analytic = gradient(params, truth.matrix, config);
    const double h = 1e-5;
    auto fd_check = [&](std::map<std::string, double>& block, const std::string& id,
                        double analytic_value, bool log_space) {
      const double original = block.at(id);
      block[id] = log_space ? original * std::exp(h) : original + h;
      const double up = neg_log_posterior(params, truth.matrix, config);
      block[id] = log_space ? original * std::exp(-h) : original - h;
      const double down = neg_log_posterior(params, truth.matrix, config);
      block[id] = original;
      worst = std::max(worst, relative_error((up - down) / (2.0 * h), analytic_value));
    };
    for (const auto& [id, g] : analytic.skills) fd_check(params.skills, id, g, false);
    for (const auto& [id, g] : analytic.difficulties) fd_check(params.difficulties, id, g, false);
    for (const auto& [id, g] : analytic.log_discriminations) {
      fd_check(params.discriminations, id, g, true);
    }
  }
  report(2, "analytic gradient vs central differences (20 x 15x15)", worst <= 1e-5,
         fmt("max relative error = %.3g (<= 1e-5)", worst));
}

void criterion_3() {
  double worst_tif = 0.0;
  for (double gamma : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
    worst_tif = std::max(worst_tif, std::abs(tif({0.25, gamma}) - gamma));
  }
  const double kappa_error = std::abs(kappa({0.0, 1.0}) - (1.0 - std::exp(-1.0)));
  const bool ok = worst_tif <= 1e-5 && kappa_error <= 1e-6;
  report(3, "quadrature matches the closed form", ok,
         fmt("max |tif - gamma| = %.3g (<= 1e-5), |kappa(1) - (1-1/e)| = %.3g (<= 1e-6)",
             worst_tif, kappa_error));
}

void criterion_4() {
  Rng rng(4004);
  int exact = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    const ItemParams item{rng.normal() * 2.0, rng.gamma(2.0, 1.0)};
    if (static_cast<double>(p_correct(item.difficulty, item)) == 0.5) ++exact;
  }
  report(4, "p_correct at the difficulty is exactly 0.5", exact == n,
         fmt("%d / %d items exact", exact, n));
}

void criterion_5() {
  FitConfig config;
  config.seed = 5;

  SynthConfig synth;
  synth.n_humans = 40;
  synth.n_models = 30;
  synth.n_items = 50;
  synth.human_skill_mean = 0.75;   // humans shifted +1.5 above models
  synth.model_skill_mean = -0.75;
  synth.seed = 501;

  const SynthTruth adversarial = generate(synth);
  const DatasetReport pro_human =
      score_dataset(adversarial.matrix, fit(adversarial.matrix, config));

  SynthConfig mirrored = synth;
  mirrored.human_skill_mean = -0.75;
  mirrored.model_skill_mean = 0.75;
  mirrored.seed = 502;
  const SynthTruth inverse = generate(mirrored);
  const DatasetReport pro_model = score_dataset(inverse.matrix, fit(inverse.matrix, config));

  double worst_identity = 0.0;
  for (const DatasetReport* r : {&pro_human, &pro_model}) {
    for (const ItemScore& s : r->item_scores) {
      worst_identity = std::max(
          worst_identity,
          std::abs(s.advscore - s.margin / (1.0 + s.ambiguity) * (1.0 + s.discriminability)));
    }
  }
  const bool ok =
      pro_human.dataset_advscore > 0.0 && pro_model.dataset_advscore < 0.0 && worst_identity <= 1e-12;
  report(5, "sign law and the combined identity", ok,
         fmt("advscore(humans above)=%.3f (>0), advscore(models above)=%.3f (<0), "
             "max identity gap=%.3g (<=1e-12)",
             pro_human.dataset_advscore, pro_model.dataset_advscore, worst_identity));
}

void criterion_6() {
  // Exact two-member oracle: skills ln(4), ln(1.5) give p = 0.8, 0.6.
  IrtParameters params;
  params.skills["a"] = std::log(4.0);
  params.skills["b"] = std::log(1.5);
  params.skills["c"] = std::log(4.0);
  SkilledGroup pair;
  pair.member_ids = {"a", "b"};
  const double delta_pair = ambiguity({0.0, 1.0}, pair, params);

  SkilledGroup same;
  same.member_ids = {"a", "c"};
  const double delta_same = ambiguity({0.0, 1.0}, same, params);

  Rng rng(606);
  double max_delta = 0.0;
  bool bounded = true;
  for (int trial = 0; trial < 10000; ++trial) {
    IrtParameters p;
    SkilledGroup g;
    const int n = 2 + static_cast<int>(rng.uniform() * 7);
    for (int i = 0; i < n; ++i) {
      const std::string id = "s" + std::to_string(i);
      p.skills[id] = rng.normal() * 4.0;
      g.member_ids.push_back(id);
    }
    const double d = ambiguity({rng.normal(), rng.gamma(2.0, 1.0)}, g, p);
    max_delta = std::max(max_delta, d);
    bounded = bounded && d >= 0.0 && d <= 0.5;
  }
  const bool ok = std::abs(delta_pair - 0.1) <= 1e-12 && delta_same == 0.0 && bounded;
  report(6, "ambiguity oracle and bound", ok,
         fmt("delta({0.8,0.6})=%.15f (=0.1 +- 1e-12), homogeneous=%.1g, max over 1e4 random "
             "groups=%.4f (<=0.5)",
             delta_pair, delta_same, max_delta));
}

void criterion_7() {
  // Hand-built pools: the 2021 cohort exceeds every 2020 model.
  ResponseMatrix matrix;
  IrtParameters params;
  auto add_subject = [&](const std::string& id, PoolKind kind, std::optional<int> year,
                         double skill) {
    Subject s;
    s.id = id;
    s.kind = kind;
    s.year_introduced = year;
    matrix.subjects.push_back(s);
    params.skills[id] = skill;
  };
  add_subject("h1", PoolKind::Human, std::nullopt, 0.4);
  add_subject("h2", PoolKind::Human, std::nullopt, 1.6);
  add_subject("m1", PoolKind::Model, 2020, -1.2);
  add_subject("m2", PoolKind::Model, 2020, -0.1);
  add_subject("m3", PoolKind::Model, 2021, 2.8);
  add_subject("m4", PoolKind::Model, 2021, 3.9);
  const double thetas[] = {-1.5, -0.6, 0.0, 0.8, 1.7, -2.2, 2.5};
  const double gammas[] = {0.6, 1.1, 1.4, 2.2, 0.8, 1.9, 0.5};
  for (int j = 0; j < 7; ++j) {
    ItemMeta item;
    item.id = "q" + std::to_string(j);
    matrix.items.push_back(item);
    params.difficulties[item.id] = thetas[j];
    params.discriminations[item.id] = gammas[j];
  }
  for (const Subject& s : matrix.subjects) {
    for (const ItemMeta& item : matrix.items) {
      matrix.records.push_back({s.id, item.id, (s.id[0] + item.id[1]) % 2 == 0});
    }
  }
  matrix.validate();

  // Per-item margins against both cumulative model pools.
  std::vector<Subject> year1;
  std::vector<Subject> year2;
  for (const Subject& s : matrix.subjects) {
    if (s.kind != PoolKind::Model) continue;
    if (*s.year_introduced <= 2020) year1.push_back(s);
    year2.push_back(s);
  }
  const SkilledGroup humans = select_group(params, matrix.subjects, PoolKind::Human, 0.0);
  const SkilledGroup models_y1 = select_group(params, year1, PoolKind::Model, 0.0);
  const SkilledGroup models_y2 = select_group(params, year2, PoolKind::Model, 0.0);
  bool every_margin_drops = true;
  for (const ItemMeta& item : matrix.items) {
    const ItemParams ip{params.difficulties.at(item.id), params.discriminations.at(item.id)};
    const double mu_before = margin(ip, humans.representative_skill, models_y1.representative_skill);
    const double mu_after = margin(ip, humans.representative_skill, models_y2.representative_skill);
    every_margin_drops = every_margin_drops && mu_after < mu_before;
  }

  ChronoOptions options;
  options.years = {2020, 2021};
  options.mode = ChronoMode::FixedParams;
  FitConfig config;
  const ChronoSeries series = chrono_advscore(matrix, config, {}, options, &params);
  const bool series_drops =
      series.points.size() == 2 && series.points[1].advscore < series.points[0].advscore;

  report(7, "chronological monotonicity (fixed parameters)", every_margin_drops && series_drops,
         fmt("all 7 margins strictly drop=%s, advscore %.4f -> %.4f",
             every_margin_drops ? "yes" : "no",
             series.points.empty() ? 0.0 : series.points[0].advscore,
             series.points.size() < 2 ? 0.0 : series.points[1].advscore));
}

void criterion_8() {
  int logistic_hits = 0;
  int linear_hits = 0;
  const int runs = 10;
  for (int seed = 1; seed <= runs; ++seed) {
    Rng rng(seed);
    FeatureMatrix features;
    const int n_features = 8;
    for (int f = 0; f < n_features; ++f) {
      features.feature_names.push_back("f" + std::to_string(f));
    }
    std::vector<ItemScore> scores;
    for (int i = 0; i < 200; ++i) {
      const std::string id = "q" + std::to_string(i);
      features.item_ids.push_back(id);
      std::vector<std::uint8_t> row(n_features, 0);
      for (int f = 0; f < n_features; ++f) row[f] = rng.uniform() < 0.5 ? 1 : 0;
      features.indicators.push_back(row);
      ItemScore s;
      s.item_id = id;
      s.advscore = 0.1 + 0.3 * row[0] + 0.05 * rng.normal();
      scores.push_back(s);
    }
    auto top = [](const AttributionResult& r) {
      std::string best;
      double best_value = -1e300;
      for (const auto& [name, value] : r.coefficients) {
        if (value > best_value) {
          best_value = value;
          best = name;
        }
      }
      return best;
    };
    if (top(fit_attribution(features, scores, AttributionMode::LogisticAboveMedian, 1.0)) == "f0") {
      ++logistic_hits;
    }
    if (top(fit_attribution(features, scores, AttributionMode::LinearOnScore, 1.0)) == "f0") {
      ++linear_hits;
    }
  }
  const bool ok = logistic_hits == runs && linear_hits == runs;
  report(8, "planted feature ranks first in both modes", ok,
         fmt("logistic %d/10, linear %d/10", logistic_hits, linear_hits));
}

void criterion_9() {
  TempDir dir;
  const int rc_sim = cli::run({"advscore", "simulate", "--humans", "20", "--models", "12",
                               "--items", "15", "--seed", "11", "--out-dir", dir.path.string()});
  const auto score_args = [&](const std::string& out) {
    return std::vector<std::string>{"advscore",
                                    "score",
                                    "--responses",
                                    dir.file("responses.csv").string(),
                                    "--subjects",
                                    dir.file("subjects.csv").string(),
                                    "--items",
                                    dir.file("items.csv").string(),
                                    "--seed",
                                    "11",
                                    "--timestamp",
                                    "2026-01-01T00:00:00Z",
                                    "--out",
                                    out};
  };
  const int rc_a = cli::run(score_args(dir.file("a.json").string()));
  const int rc_b = cli::run(score_args(dir.file("b.json").string()));
  const std::string a = read_file(dir.file("a.json"));
  const bool bytes_equal = rc_sim == 0 && rc_a == 0 && rc_b == 0 && !a.empty() &&
                           a == read_file(dir.file("b.json"));

  // Record-order permutation leaves the fit untouched.
  const ResponseMatrix matrix =
      load_matrix(dir.file("responses.csv"), dir.file("subjects.csv"), dir.file("items.csv"));
  ResponseMatrix reversed = matrix;
  std::reverse(reversed.records.begin(), reversed.records.end());
  FitConfig config;
  config.seed = 11;
  config.max_epochs = 150;
  const IrtParameters p1 = fit(matrix, config);
  const IrtParameters p2 = fit(reversed, config);
  const bool permutation_invariant = p1.skills == p2.skills &&
                                     p1.difficulties == p2.difficulties &&
                                     p1.discriminations == p2.discriminations;

  report(9, "byte-identical reports and record-order invariance",
         bytes_equal && permutation_invariant,
         fmt("bytes equal=%s, permuted-fit identical=%s", bytes_equal ? "yes" : "no",
             permutation_invariant ? "yes" : "no"));
}

}  // namespace

int main() {
  std::printf("acceptance suite (tool version %s)\n", kVersion);
  const RecoveryRun recovery_run = criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10(recovery_run);
  if (failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criterion(s) failed\n", failures);
  }
  return failures == 0 ? 0 : 1;
}
