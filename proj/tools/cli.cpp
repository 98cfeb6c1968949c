#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <map>
#include <optional>
#include <set>

#include <CLI11.hpp>

#include <advscore/io.hpp>
#include <advscore/rng.hpp>
#include <advscore/version.hpp>

namespace advscore::cli {

namespace {

std::string now_iso8601_utc() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct CommonArgs {
  std::string responses;
  std::string subjects;
  std::string items;
  std::string params_path;  // optional pre-fitted parameters
  FitConfig fit;
  ScoreOptions scoring;
  std::uint64_t seed = 0;
  std::string timestamp;
  std::string delta_policy = "experts";
  std::string format = "json";
};

void add_input_options(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--responses", args.responses, "responses.csv path")->required();
  cmd->add_option("--subjects", args.subjects, "subjects.csv path")->required();
  cmd->add_option("--items", args.items, "items.csv path")->required();
}

void add_fit_options(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--lr", args.fit.learning_rate, "Adam learning rate");
  cmd->add_option("--max-epochs", args.fit.max_epochs, "maximum training epochs");
  cmd->add_option("--patience", args.fit.patience, "early-stopping patience");
  cmd->add_option("--holdout", args.fit.holdout_fraction,
                  "holdout fraction in [0,0.5); 0 disables early stopping");
  cmd->add_option("--gamma-shape", args.fit.gamma_prior_shape, "Gamma prior shape");
  cmd->add_option("--gamma-scale", args.fit.gamma_prior_scale, "Gamma prior scale");
  cmd->add_option("--tolerance", args.fit.tolerance, "loss plateau tolerance");
}

void add_scoring_options(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--k", args.scoring.k_skilled, "skilled-group threshold in pool stddevs");
  cmd->add_option("--delta-policy", args.delta_policy,
                  "ambiguity group: 'experts' (flagged experts, else humans at k=1) or 'k1'")
      ->check(CLI::IsMember({"experts", "k1"}));
  cmd->add_option("--quad-intervals", args.scoring.quadrature.intervals,
                  "Simpson intervals for the information integral");
}

void add_output_options(CLI::App* cmd, CommonArgs& args, std::string& out) {
  cmd->add_option("--out", out, "output path")->required();
  cmd->add_option("--format", args.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--timestamp", args.timestamp,
                  "manifest timestamp (defaults to now; fix it for reproducible bytes)");
}

ScoreOptions finalize_scoring(CommonArgs& args) {
  args.scoring.delta_policy = args.delta_policy == "k1" ? DeltaPolicy::SkillThreshold
                                                        : DeltaPolicy::PreferExperts;
  return args.scoring;
}

RunManifest make_manifest(const CommonArgs& args) {
  RunManifest manifest;
  manifest.version = kVersion;
  manifest.timestamp = args.timestamp.empty() ? now_iso8601_utc() : args.timestamp;
  manifest.seed = args.seed;
  manifest.fit = args.fit;
  manifest.scoring = args.scoring;
  if (!args.responses.empty()) manifest.inputs["responses"] = args.responses;
  if (!args.subjects.empty()) manifest.inputs["subjects"] = args.subjects;
  if (!args.items.empty()) manifest.inputs["items"] = args.items;
  if (!args.params_path.empty()) manifest.inputs["params"] = args.params_path;
  return manifest;
}

ReportFormat parse_format(const std::string& format) {
  return format == "csv" ? ReportFormat::Csv : ReportFormat::Json;
}

IrtParameters obtain_params(const CommonArgs& args, const ResponseMatrix& matrix) {
  if (!args.params_path.empty()) {
    IrtParameters params = load_params(args.params_path);
    validate_params_for(params, matrix);
    return params;
  }
  return fit(matrix, args.fit);
}

int cmd_fit(const CommonArgs& args, const std::string& out) {
  const ResponseMatrix matrix = load_matrix(args.responses, args.subjects, args.items);
  const IrtParameters params = fit(matrix, args.fit);
  save_params(params, make_manifest(args), out);
  std::cout << "fit: " << params.skills.size() << " subjects, " << params.difficulties.size()
            << " items, " << params.epochs_run << " epochs, final loss "
            << params.final_loss << "\n";
  return 0;
}

int cmd_score(CommonArgs& args, const std::string& out) {
  const ResponseMatrix matrix = load_matrix(args.responses, args.subjects, args.items);
  const ScoreOptions options = finalize_scoring(args);
  const IrtParameters params = obtain_params(args, matrix);
  FullReport report;
  report.manifest = make_manifest(args);
  report.dataset = score_dataset(matrix, params, options);
  write_report(report, out, parse_format(args.format));
  std::cout << "score: " << report.dataset.item_scores.size() << " items, dataset advscore "
            << report.dataset.dataset_advscore << " -> " << out << "\n";
  return 0;
}

int cmd_chrono(CommonArgs& args, const std::string& out, std::vector<int> years,
               const std::string& mode, const std::string& dataset_id) {
  const ResponseMatrix matrix = load_matrix(args.responses, args.subjects, args.items);
  if (years.empty()) {
    std::set<int> derived;
    for (const Subject& s : matrix.subjects) {
      if (s.kind == PoolKind::Model && s.year_introduced) derived.insert(*s.year_introduced);
    }
    years.assign(derived.begin(), derived.end());
    if (years.empty()) {
      throw InvalidArgumentError("chrono: no model has a year; supply --years or year metadata");
    }
  }
  ChronoOptions chrono_options;
  chrono_options.years = std::move(years);
  chrono_options.mode = mode == "fixed" ? ChronoMode::FixedParams : ChronoMode::Refit;
  chrono_options.dataset_id = dataset_id;

  const ScoreOptions options = finalize_scoring(args);
  const IrtParameters full_fit = obtain_params(args, matrix);

  FullReport report;
  report.manifest = make_manifest(args);
  report.dataset = score_dataset(matrix, full_fit, options);
  // The full fit doubles as the fixed-mode parameter set; refit mode refits
  // each year slice on its own.
  report.chrono = chrono_advscore(matrix, args.fit, options, chrono_options, &full_fit);
  write_report(report, out, parse_format(args.format));
  const ChronoSeries& series = *report.chrono;
  std::cout << "chrono: " << series.points.size() << " year points";
  if (!series.skipped_years.empty()) {
    std::cout << " (" << series.skipped_years.size() << " skipped: empty model pool)";
  }
  std::cout << " -> " << out << "\n";
  for (const ChronoPoint& p : series.points) {
    std::cout << "  " << p.year << ": advscore " << p.advscore << " over " << p.model_ids.size()
              << " models\n";
  }
  return 0;
}

int cmd_attribute(CommonArgs& args, const std::string& out, const std::string& mode, double l2) {
  const ResponseMatrix matrix = load_matrix(args.responses, args.subjects, args.items);
  const ScoreOptions options = finalize_scoring(args);
  const IrtParameters params = obtain_params(args, matrix);
  FullReport report;
  report.manifest = make_manifest(args);
  report.dataset = score_dataset(matrix, params, options);
  const FeatureMatrix features = features_from_items(matrix.items);
  report.attribution = fit_attribution(
      features, report.dataset.item_scores,
      mode == "linear" ? AttributionMode::LinearOnScore : AttributionMode::LogisticAboveMedian,
      l2, args.seed);
  write_report(report, out, parse_format(args.format));
  std::cout << "attribute: " << report.attribution->coefficients.size() << " features -> " << out
            << "\n";
  return 0;
}

int cmd_simulate(CommonArgs& args, const SynthConfig& synth_config, const std::string& out_dir,
                 bool run_fit) {
  const SynthTruth truth = generate(synth_config);
  std::cout << "simulate: " << truth.matrix.subjects.size() << " subjects, "
            << truth.matrix.items.size() << " items, " << truth.matrix.records.size()
            << " records (seed " << synth_config.seed << ")\n";
  if (!out_dir.empty()) {
    emit_synth(truth, make_manifest(args), out_dir);
    std::cout << "  wrote responses.csv, subjects.csv, items.csv, truth.json to " << out_dir
              << "\n";
  }
  if (run_fit) {
    const IrtParameters fitted = fit(truth.matrix, args.fit);
    const RecoveryReport recovery = recovery_report(truth, fitted);
    std::printf("recovery: r_skill=%.4f r_difficulty=%.4f r_discrimination=%.4f\n",
                recovery.r_skill, recovery.r_difficulty, recovery.r_discrimination);
    std::printf("rmse:     skill=%.4f difficulty=%.4f discrimination=%.4f\n",
                recovery.rmse_skill, recovery.rmse_difficulty, recovery.rmse_discrimination);
    std::cout << "  (" << fitted.epochs_run << " epochs, final loss " << fitted.final_loss
              << ")\n";
  }
  return 0;
}

int cmd_check(std::uint64_t seed) {
  int failures = 0;
  auto report = [&](const char* name, bool ok, const std::string& detail) {
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << ": " << detail << "\n";
    if (!ok) ++failures;
  };

  {
    const double s0 = sigmoid(0.0);
    const double s1 = sigmoid(1.0);
    const bool ok = s0 == 0.5 && std::abs(s1 - 0.7310585786300049) < 1e-12;
    report("sigmoid", ok, "sigmoid(0)=" + std::to_string(s0));
  }
  {
    double worst = 0.0;
    for (double gamma : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
      worst = std::max(worst, std::abs(tif({0.3, gamma}) - tif_closed_form({0.3, gamma})));
    }
    const double k1 = kappa({0.0, 1.0});
    const bool ok = worst <= 1e-5 && std::abs(k1 - (1.0 - std::exp(-1.0))) <= 1e-6;
    char buf[64];
    std::snprintf(buf, sizeof buf, "max |tif - gamma| = %.3g", worst);
    report("quadrature", ok, buf);
  }
  {
    // Gradient vs. central finite differences on a small seeded instance.
    SynthConfig config;
    config.n_humans = 7;
    config.n_models = 5;
    config.n_items = 12;
    config.seed = seed;
    const SynthTruth truth = generate(config);
    FitConfig fit_config;
    fit_config.seed = seed;
    Rng rng(seed + 1);
    IrtParameters params;
    for (const Subject& s : truth.matrix.subjects) params.skills[s.id] = rng.normal();
    for (const ItemMeta& item : truth.matrix.items) {
      params.difficulties[item.id] = rng.normal();
      params.discriminations[item.id] = rng.gamma(2.0, 1.0);
    }
    const ParameterGradient analytic = gradient(params, truth.matrix, fit_config);
    const double h = 1e-5;
    double worst = 0.0;
    auto check_block = [&](std::map<std::string, double>& block, const std::string& id,
                           double analytic_value, bool log_space) {
      const double original = block.at(id);
      block[id] = log_space ? original * std::exp(h) : original + h;
      const double up = neg_log_posterior(params, truth.matrix, fit_config);
      block[id] = log_space ? original * std::exp(-h) : original - h;
      const double down = neg_log_posterior(params, truth.matrix, fit_config);
      block[id] = original;
      const double fd = (up - down) / (2.0 * h);
      const double rel = std::abs(fd - analytic_value) /
                         std::max({std::abs(fd), std::abs(analytic_value), 1e-8});
      worst = std::max(worst, rel);
    };
    for (const auto& [id, g] : analytic.skills) check_block(params.skills, id, g, false);
    for (const auto& [id, g] : analytic.difficulties) check_block(params.difficulties, id, g, false);
    for (const auto& [id, g] : analytic.log_discriminations) {
      check_block(params.discriminations, id, g, true);
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "max relative error = %.3g", worst);
    report("gradient", worst <= 1e-5, buf);
  }

  if (failures > 0) {
    std::cout << failures << " self-test(s) failed\n";
    return 2;
  }
  std::cout << "all self-tests passed\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"AdvScore: 2PL IRT fitting and adversarialness scoring for benchmark response logs"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string out;
  std::string chrono_mode = "refit";
  std::string dataset_id = "dataset";
  std::string years_text;
  std::string attribution_mode = "logistic";
  double l2 = 1.0;
  SynthConfig synth_config;
  std::string preset;
  std::string out_dir;
  bool simulate_fit = false;

  CLI::App* fit_cmd = app.add_subcommand("fit", "fit IRT parameters from a response log");
  add_input_options(fit_cmd, args);
  add_fit_options(fit_cmd, args);
  fit_cmd->add_option("--seed", args.seed, "random seed");
  fit_cmd->add_option("--out", out, "output parameters file")->required();
  fit_cmd->add_option("--timestamp", args.timestamp, "manifest timestamp");

  CLI::App* score_cmd = app.add_subcommand("score", "score a dataset (fits unless --params given)");
  add_input_options(score_cmd, args);
  score_cmd->add_option("--params", args.params_path, "pre-fitted parameters file");
  add_fit_options(score_cmd, args);
  add_scoring_options(score_cmd, args);
  score_cmd->add_option("--seed", args.seed, "random seed");
  add_output_options(score_cmd, args, out);

  CLI::App* chrono_cmd = app.add_subcommand("chrono", "adversarialness decay over model years");
  add_input_options(chrono_cmd, args);
  chrono_cmd->add_option("--params", args.params_path,
                         "pre-fitted parameters file (fixed mode only)");
  add_fit_options(chrono_cmd, args);
  add_scoring_options(chrono_cmd, args);
  chrono_cmd->add_option("--seed", args.seed, "random seed");
  chrono_cmd->add_option("--years", years_text, "comma-separated years (default: model years)");
  chrono_cmd->add_option("--mode", chrono_mode, "refit per year slice, or reuse one fit")
      ->check(CLI::IsMember({"refit", "fixed"}));
  chrono_cmd->add_option("--dataset-id", dataset_id, "identifier stored in the series");
  add_output_options(chrono_cmd, args, out);

  CLI::App* attr_cmd = app.add_subcommand("attribute", "regress item scores on tactic/topic tags");
  add_input_options(attr_cmd, args);
  attr_cmd->add_option("--params", args.params_path, "pre-fitted parameters file");
  add_fit_options(attr_cmd, args);
  add_scoring_options(attr_cmd, args);
  attr_cmd->add_option("--seed", args.seed, "random seed");
  attr_cmd->add_option("--mode", attribution_mode, "regression target")
      ->check(CLI::IsMember({"logistic", "linear"}));
  attr_cmd->add_option("--l2", l2, "ridge strength");
  add_output_options(attr_cmd, args, out);

  CLI::App* sim_cmd = app.add_subcommand("simulate", "generate synthetic truth and check recovery");
  sim_cmd->add_option("--preset", preset, "named configuration")->check(CLI::IsMember({"recovery"}));
  sim_cmd->add_option("--humans", synth_config.n_humans, "human subject count");
  sim_cmd->add_option("--models", synth_config.n_models, "model subject count");
  sim_cmd->add_option("--items", synth_config.n_items, "item count");
  sim_cmd->add_option("--human-mean", synth_config.human_skill_mean, "human skill mean");
  sim_cmd->add_option("--model-mean", synth_config.model_skill_mean, "model skill mean");
  sim_cmd->add_option("--stddev", synth_config.skill_stddev, "skill standard deviation");
  sim_cmd->add_option("--gen-gamma-shape", synth_config.gamma_shape,
                      "true discrimination Gamma shape");
  sim_cmd->add_option("--gen-gamma-scale", synth_config.gamma_scale,
                      "true discrimination Gamma scale");
  sim_cmd->add_option("--density", synth_config.response_density, "response density in (0,1]");
  sim_cmd->add_option("--seed", args.seed, "random seed");
  sim_cmd->add_option("--out-dir", out_dir, "emit CSV files and truth.json here");
  sim_cmd->add_flag("--fit,!--no-fit", simulate_fit, "fit and report parameter recovery");
  add_fit_options(sim_cmd, args);
  sim_cmd->add_option("--timestamp", args.timestamp, "manifest timestamp");

  CLI::App* check_cmd = app.add_subcommand("check", "run gradient and quadrature self-tests");
  check_cmd->add_option("--seed", args.seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    args.fit.seed = args.seed;
    if (fit_cmd->parsed()) return cmd_fit(args, out);
    if (score_cmd->parsed()) return cmd_score(args, out);
    if (chrono_cmd->parsed()) {
      std::vector<int> years;
      if (!years_text.empty()) {
        std::size_t start = 0;
        while (start <= years_text.size()) {
          const std::size_t comma = years_text.find(',', start);
          const std::string token =
              years_text.substr(start, comma == std::string::npos ? comma : comma - start);
          if (token.empty()) throw InvalidArgumentError("--years: empty entry");
          try {
            years.push_back(std::stoi(token));
          } catch (...) {
            throw InvalidArgumentError("--years: invalid year '" + token + "'");
          }
          if (comma == std::string::npos) break;
          start = comma + 1;
        }
      }
      return cmd_chrono(args, out, std::move(years), chrono_mode, dataset_id);
    }
    if (attr_cmd->parsed()) return cmd_attribute(args, out, attribution_mode, l2);
    if (sim_cmd->parsed()) {
      if (preset == "recovery") {
        synth_config = SynthConfig{};  // the defaults are the recovery preset
        simulate_fit = true;
      }
      synth_config.seed = args.seed;
      return cmd_simulate(args, synth_config, out_dir, simulate_fit);
    }
    if (check_cmd->parsed()) return cmd_check(args.seed);
    std::cerr << "no subcommand given\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace advscore::cli
