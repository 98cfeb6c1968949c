#include <advscore/synth.hpp>

#include <cmath>
#include <iomanip>
#include <sstream>

#include <advscore/irt.hpp>
#include <advscore/rng.hpp>

namespace advscore {

namespace {

std::string padded_id(char prefix, int index, int total) {
  int width = 6;
  for (long long cap = 1000000; cap <= total; cap *= 10) ++width;
  std::ostringstream os;
  os << prefix << std::setw(width) << std::setfill('0') << index + 1;
  return os.str();
}

double pair_mean(const std::map<std::string, double>& a, const std::map<std::string, double>& b,
                 std::vector<double>& xs, std::vector<double>& ys) {
  xs.clear();
  ys.clear();
  for (const auto& [key, value] : a) {
    const auto it = b.find(key);
    if (it == b.end()) {
      throw ConsistencyError("recovery_report: key sets differ at '" + key + "'");
    }
    xs.push_back(value);
    ys.push_back(it->second);
  }
  if (a.size() != b.size()) {
    throw ConsistencyError("recovery_report: key sets differ in size");
  }
  double rmse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = xs[i] - ys[i];
    rmse += d * d;
  }
  return std::sqrt(rmse / static_cast<double>(xs.size()));
}

}  // namespace

void validate_synth_config(const SynthConfig& config) {
  if (config.n_humans <= 0 || config.n_models < 0 || config.n_items <= 0) {
    throw InvalidArgumentError("synth: subject and item counts must be positive");
  }
  if (!std::isfinite(config.human_skill_mean) || !std::isfinite(config.model_skill_mean)) {
    throw InvalidArgumentError("synth: skill means must be finite");
  }
  if (!(config.skill_stddev > 0.0) || !std::isfinite(config.skill_stddev)) {
    throw InvalidArgumentError("synth: skill_stddev must be finite and > 0");
  }
  if (!(config.gamma_shape > 0.0) || !(config.gamma_scale > 0.0)) {
    throw InvalidArgumentError("synth: gamma shape and scale must be > 0");
  }
  if (!(config.response_density > 0.0 && config.response_density <= 1.0)) {
    throw InvalidArgumentError("synth: response_density must lie in (0, 1]");
  }
}

SynthTruth generate(const SynthConfig& config) {
  validate_synth_config(config);
  Rng rng(substream_seed(config.seed, streams::kSynth));
  SynthTruth truth;

  // Draw order is fixed: human skills, model skills, difficulties,
  // discriminations, then per-pair keep/response uniforms.
  const int n_subjects = config.n_humans + config.n_models;
  for (int i = 0; i < config.n_humans; ++i) {
    Subject s;
    s.id = padded_id('h', i, config.n_humans);
    s.kind = PoolKind::Human;
    truth.matrix.subjects.push_back(s);
    truth.true_skills[s.id] = config.human_skill_mean + config.skill_stddev * rng.normal();
  }
  for (int i = 0; i < config.n_models; ++i) {
    Subject s;
    s.id = padded_id('m', i, config.n_models);
    s.kind = PoolKind::Model;
    truth.matrix.subjects.push_back(s);
    truth.true_skills[s.id] = config.model_skill_mean + config.skill_stddev * rng.normal();
  }
  for (int j = 0; j < config.n_items; ++j) {
    ItemMeta item;
    item.id = padded_id('q', j, config.n_items);
    truth.matrix.items.push_back(item);
    truth.true_difficulties[item.id] = rng.normal();
  }
  for (int j = 0; j < config.n_items; ++j) {
    truth.true_discriminations[truth.matrix.items[j].id] =
        rng.gamma(config.gamma_shape, config.gamma_scale);
  }

  truth.matrix.records.reserve(
      static_cast<std::size_t>(n_subjects) * static_cast<std::size_t>(config.n_items));
  for (const Subject& s : truth.matrix.subjects) {
    const double beta = truth.true_skills.at(s.id);
    for (const ItemMeta& meta : truth.matrix.items) {
      const double keep = rng.uniform();
      if (keep >= config.response_density) continue;
      const ItemParams item{truth.true_difficulties.at(meta.id),
                            truth.true_discriminations.at(meta.id)};
      const double p = p_correct(beta, item);
      truth.matrix.records.push_back({s.id, meta.id, rng.uniform() < p});
    }
  }
  return truth;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.empty()) {
    throw InvalidArgumentError("pearson: vectors must be nonempty and equal-length");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return sxy / std::sqrt(sxx * syy);  // NaN when either side is constant
}

RecoveryReport recovery_report(const SynthTruth& truth, const IrtParameters& fitted) {
  RecoveryReport report;
  std::vector<double> xs;
  std::vector<double> ys;

  report.rmse_skill = pair_mean(truth.true_skills, fitted.skills, xs, ys);
  report.r_skill = pearson(xs, ys);
  report.rmse_difficulty = pair_mean(truth.true_difficulties, fitted.difficulties, xs, ys);
  report.r_difficulty = pearson(xs, ys);
  report.rmse_discrimination = pair_mean(truth.true_discriminations, fitted.discriminations, xs, ys);
  report.r_discrimination = pearson(xs, ys);
  return report;
}

}  // namespace advscore
