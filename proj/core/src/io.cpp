#include <advscore/io.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "csv.hpp"

namespace advscore {

namespace {

using Json = nlohmann::ordered_json;

// Reports carry 10 significant digits: round through text so the emitted
// shortest representation never exceeds that.
Json report_num(double v) {
  if (!std::isfinite(v)) return nullptr;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return std::stod(buf);
}

// Parameter files keep full round-trip precision instead.
Json exact_num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

std::string format_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

[[noreturn]] void fail_at(const std::filesystem::path& path, std::size_t line,
                          const std::string& msg) {
  throw ParseError(path.string() + ":" + std::to_string(line) + ": " + msg);
}

void expect_header(const std::filesystem::path& path,
                   const std::vector<detail::CsvRecord>& records,
                   const std::vector<std::string>& expected, std::size_t required_prefix) {
  if (records.empty()) {
    fail_at(path, 1, "missing header row");
  }
  const auto& header = records.front().fields;
  if (header.size() < required_prefix || header.size() > expected.size()) {
    fail_at(path, records.front().line, "unexpected column count in header");
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] != expected[i]) {
      fail_at(path, records.front().line,
              "expected column '" + expected[i] + "', got '" + header[i] + "'");
    }
  }
}

int parse_int(const std::filesystem::path& path, std::size_t line, const std::string& text,
              const std::string& what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (...) {
    fail_at(path, line, "invalid " + what + " '" + text + "'");
  }
}

std::vector<std::string> split_tags(const std::string& text) {
  std::vector<std::string> tags;
  std::string current;
  for (char c : text) {
    if (c == ';') {
      if (!current.empty()) tags.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) tags.push_back(std::move(current));
  return tags;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  out << text;
  if (!out) {
    throw IoError("failed writing '" + path.string() + "'");
  }
}

const char* delta_policy_name(DeltaPolicy policy) {
  return policy == DeltaPolicy::PreferExperts ? "prefer_experts" : "skill_threshold";
}

const char* chrono_mode_name(ChronoMode mode) {
  return mode == ChronoMode::Refit ? "refit" : "fixed_params";
}

const char* attribution_mode_name(AttributionMode mode) {
  return mode == AttributionMode::LogisticAboveMedian ? "logistic_above_median"
                                                      : "linear_on_score";
}

Json manifest_json(const RunManifest& manifest) {
  Json j;
  j["tool"] = manifest.tool;
  j["version"] = manifest.version;
  j["timestamp"] = manifest.timestamp;
  j["seed"] = manifest.seed;
  Json inputs = Json::object();
  for (const auto& [role, path] : manifest.inputs) inputs[role] = path;
  j["inputs"] = inputs;
  j["fit"] = {{"learning_rate", exact_num(manifest.fit.learning_rate)},
              {"max_epochs", manifest.fit.max_epochs},
              {"patience", manifest.fit.patience},
              {"holdout_fraction", exact_num(manifest.fit.holdout_fraction)},
              {"gamma_prior_shape", exact_num(manifest.fit.gamma_prior_shape)},
              {"gamma_prior_scale", exact_num(manifest.fit.gamma_prior_scale)},
              {"seed", manifest.fit.seed},
              {"tolerance", exact_num(manifest.fit.tolerance)}};
  j["scoring"] = {
      {"k", exact_num(manifest.scoring.k_skilled)},
      {"delta_policy", delta_policy_name(manifest.scoring.delta_policy)},
      {"quadrature",
       {{"half_width_scale", exact_num(manifest.scoring.quadrature.half_width_scale)},
        {"gamma_floor", exact_num(manifest.scoring.quadrature.gamma_floor)},
        {"intervals", manifest.scoring.quadrature.intervals}}},
      {"curves",
       {{"theta_min", exact_num(manifest.scoring.curves.theta_min)},
        {"theta_max", exact_num(manifest.scoring.curves.theta_max)},
        {"grid_points", manifest.scoring.curves.grid_points},
        {"density_bins", manifest.scoring.curves.density_bins}}}};
  return j;
}

Json group_json(const SkilledGroup& group) {
  Json j;
  j["kind"] = to_string(group.pool_kind);
  if (group.expert_flagged) {
    j["k"] = nullptr;
  } else {
    j["k"] = exact_num(group.expertise_level);
  }
  j["representative_skill"] = report_num(group.representative_skill);
  j["member_count"] = group.member_ids.size();
  j["member_ids"] = group.member_ids;
  j["degenerate"] = group.degenerate;
  j["expert_flagged"] = group.expert_flagged;
  return j;
}

Json optional_num(const std::optional<double>& v) {
  if (!v) return nullptr;
  return report_num(*v);
}

Json curve_array(const std::vector<double>& values) {
  Json arr = Json::array();
  for (double v : values) arr.push_back(report_num(v));
  return arr;
}

Json dataset_json(const DatasetReport& report) {
  Json j;
  j["advscore"] = report_num(report.dataset_advscore);
  j["margin"] = report_num(report.dataset_margin);
  j["ambiguity"] = report_num(report.dataset_ambiguity);
  j["discriminability"] = report_num(report.dataset_kappa);
  j["item_count"] = report.item_scores.size();
  return j;
}

Json items_json(const DatasetReport& report) {
  Json arr = Json::array();
  for (const ItemScore& s : report.item_scores) {
    Json j;
    j["item_id"] = s.item_id;
    j["margin"] = report_num(s.margin);
    j["ambiguity"] = report_num(s.ambiguity);
    j["discriminability"] = report_num(s.discriminability);
    j["advscore"] = report_num(s.advscore);
    j["human_qsr"] = optional_num(s.human_qsr);
    j["model_qsr"] = optional_num(s.model_qsr);
    arr.push_back(std::move(j));
  }
  return arr;
}

Json groups_json(const DatasetReport& report) {
  Json j;
  j["skilled_humans"] = group_json(report.skilled_humans);
  j["skilled_models"] = group_json(report.skilled_models);
  j["delta_group"] = group_json(report.delta_group);
  return j;
}

Json curves_json(const CurveBundle& curves) {
  Json j;
  j["theta"] = curve_array(curves.theta_grid);
  j["human_skill_density"] = curve_array(curves.human_skill_density);
  j["model_skill_density"] = curve_array(curves.model_skill_density);
  j["mean_correctness"] = curve_array(curves.mean_correctness);
  j["mean_iif"] = curve_array(curves.mean_iif);
  return j;
}

Json chrono_json(const ChronoSeries& series) {
  Json j;
  j["dataset_id"] = series.dataset_id;
  j["mode"] = chrono_mode_name(series.mode);
  Json points = Json::array();
  for (const ChronoPoint& p : series.points) {
    points.push_back(
        {{"year", p.year}, {"advscore", report_num(p.advscore)}, {"model_ids", p.model_ids}});
  }
  j["points"] = points;
  j["skipped_years"] = series.skipped_years;
  return j;
}

Json attribution_json(const AttributionResult& result) {
  Json j;
  j["mode"] = attribution_mode_name(result.mode);
  j["l2"] = exact_num(result.regularization_strength);
  j["intercept"] = report_num(result.intercept);
  Json coef = Json::object();
  for (const auto& [name, value] : result.coefficients) coef[name] = report_num(value);
  j["coefficients"] = coef;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  return j;
}

std::string items_csv(const DatasetReport& report) {
  std::ostringstream out;
  out << "item_id,margin,ambiguity,discriminability,advscore,human_qsr,model_qsr\n";
  for (const ItemScore& s : report.item_scores) {
    out << detail::csv_field(s.item_id) << ',' << format_num(s.margin) << ','
        << format_num(s.ambiguity) << ',' << format_num(s.discriminability) << ','
        << format_num(s.advscore) << ',' << (s.human_qsr ? format_num(*s.human_qsr) : "") << ','
        << (s.model_qsr ? format_num(*s.model_qsr) : "") << '\n';
  }
  return out.str();
}

std::string curves_csv(const CurveBundle& curves) {
  std::ostringstream out;
  out << "theta,human_skill_density,model_skill_density,mean_correctness,mean_iif\n";
  for (std::size_t i = 0; i < curves.theta_grid.size(); ++i) {
    out << format_num(curves.theta_grid[i]) << ',' << format_num(curves.human_skill_density[i])
        << ',' << format_num(curves.model_skill_density[i]) << ','
        << format_num(curves.mean_correctness[i]) << ',' << format_num(curves.mean_iif[i])
        << '\n';
  }
  return out.str();
}

std::string chrono_csv(const ChronoSeries& series) {
  std::ostringstream out;
  out << "year,advscore,model_count,model_ids\n";
  for (const ChronoPoint& p : series.points) {
    std::string joined;
    for (const std::string& id : p.model_ids) {
      if (!joined.empty()) joined.push_back(';');
      joined += id;
    }
    out << p.year << ',' << format_num(p.advscore) << ',' << p.model_ids.size() << ','
        << detail::csv_field(joined) << '\n';
  }
  return out.str();
}

std::string attribution_csv(const AttributionResult& result) {
  std::ostringstream out;
  out << "feature,coefficient\n";
  out << "(intercept)," << format_num(result.intercept) << '\n';
  for (const auto& [name, value] : result.coefficients) {
    out << detail::csv_field(name) << ',' << format_num(value) << '\n';
  }
  return out.str();
}

std::filesystem::path sibling(const std::filesystem::path& path, const std::string& suffix) {
  std::filesystem::path out = path;
  const std::string stem = out.stem().string();
  const std::string ext = out.extension().string();
  out.replace_filename(stem + suffix + ext);
  return out;
}

std::map<std::string, double> parse_param_block(const Json& j, const std::string& key,
                                                const std::filesystem::path& path) {
  if (!j.contains(key) || !j.at(key).is_object()) {
    throw ParseError(path.string() + ": missing object '" + key + "'");
  }
  std::map<std::string, double> out;
  for (const auto& [id, value] : j.at(key).items()) {
    if (!value.is_number()) {
      throw ParseError(path.string() + ": non-numeric entry for '" + id + "' in '" + key + "'");
    }
    out[id] = value.get<double>();
  }
  return out;
}

}  // namespace

ResponseMatrix load_matrix(const std::filesystem::path& responses_path,
                           const std::filesystem::path& subjects_path,
                           const std::filesystem::path& items_path) {
  ResponseMatrix matrix;

  {
    const auto rows = detail::read_csv(subjects_path);
    expect_header(subjects_path, rows, {"subject_id", "kind", "year", "expert"}, 4);
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (row.fields.size() != 4) {
        fail_at(subjects_path, row.line, "expected 4 fields");
      }
      Subject s;
      s.id = row.fields[0];
      if (s.id.empty()) fail_at(subjects_path, row.line, "empty subject_id");
      if (row.fields[1] == "human") {
        s.kind = PoolKind::Human;
      } else if (row.fields[1] == "model") {
        s.kind = PoolKind::Model;
      } else {
        fail_at(subjects_path, row.line, "kind must be 'human' or 'model', got '" + row.fields[1] + "'");
      }
      if (!row.fields[2].empty()) {
        if (s.kind == PoolKind::Human) {
          fail_at(subjects_path, row.line, "humans must not have a year");
        }
        s.year_introduced = parse_int(subjects_path, row.line, row.fields[2], "year");
      }
      if (!row.fields[3].empty()) {
        if (s.kind == PoolKind::Model) {
          fail_at(subjects_path, row.line, "models must not have an expert flag");
        }
        if (row.fields[3] == "0") {
          s.expert_flag = false;
        } else if (row.fields[3] == "1") {
          s.expert_flag = true;
        } else {
          fail_at(subjects_path, row.line, "expert must be 0, 1 or empty");
        }
      }
      matrix.subjects.push_back(std::move(s));
    }
  }

  {
    const auto rows = detail::read_csv(items_path);
    expect_header(items_path, rows, {"item_id", "tags", "text", "answer"}, 2);
    const std::size_t width = rows.front().fields.size();
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (row.fields.size() != width) {
        fail_at(items_path, row.line, "expected " + std::to_string(width) + " fields");
      }
      ItemMeta item;
      item.id = row.fields[0];
      if (item.id.empty()) fail_at(items_path, row.line, "empty item_id");
      item.tags = split_tags(row.fields[1]);
      if (width > 2) item.text = row.fields[2];
      if (width > 3) item.answer = row.fields[3];
      matrix.items.push_back(std::move(item));
    }
  }

  {
    const auto rows = detail::read_csv(responses_path);
    expect_header(responses_path, rows, {"subject_id", "item_id", "correct"}, 3);
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (row.fields.size() != 3) {
        fail_at(responses_path, row.line, "expected 3 fields");
      }
      ResponseRecord rec;
      rec.subject_id = row.fields[0];
      rec.item_id = row.fields[1];
      if (row.fields[2] == "0") {
        rec.correct = false;
      } else if (row.fields[2] == "1") {
        rec.correct = true;
      } else {
        fail_at(responses_path, row.line, "correct must be 0 or 1, got '" + row.fields[2] + "'");
      }
      matrix.records.push_back(std::move(rec));
    }
  }

  matrix.validate();
  return matrix;
}

void save_params(const IrtParameters& params, const RunManifest& manifest,
                 const std::filesystem::path& path) {
  Json j;
  j["manifest"] = manifest_json(manifest);
  Json skills = Json::object();
  for (const auto& [id, v] : params.skills) skills[id] = exact_num(v);
  Json difficulties = Json::object();
  for (const auto& [id, v] : params.difficulties) difficulties[id] = exact_num(v);
  Json discriminations = Json::object();
  for (const auto& [id, v] : params.discriminations) discriminations[id] = exact_num(v);
  j["skills"] = skills;
  j["difficulties"] = difficulties;
  j["discriminations"] = discriminations;
  j["final_loss"] = exact_num(params.final_loss);
  j["epochs_run"] = params.epochs_run;
  write_text(path, j.dump(2) + "\n");
}

IrtParameters load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  IrtParameters params;
  params.skills = parse_param_block(j, "skills", path);
  params.difficulties = parse_param_block(j, "difficulties", path);
  params.discriminations = parse_param_block(j, "discriminations", path);
  if (j.contains("final_loss") && j.at("final_loss").is_number()) {
    params.final_loss = j.at("final_loss").get<double>();
  }
  if (j.contains("epochs_run") && j.at("epochs_run").is_number_integer()) {
    params.epochs_run = j.at("epochs_run").get<int>();
  }
  for (const auto& [id, v] : params.discriminations) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw ParseError(path.string() + ": discrimination for '" + id + "' must be > 0");
    }
  }
  if (params.difficulties.size() != params.discriminations.size()) {
    throw ParseError(path.string() + ": difficulties and discriminations key sets differ");
  }
  return params;
}

void write_report(const FullReport& report, const std::filesystem::path& path,
                  ReportFormat format) {
  if (format == ReportFormat::Json) {
    Json j;
    j["manifest"] = manifest_json(report.manifest);
    j["dataset"] = dataset_json(report.dataset);
    j["items"] = items_json(report.dataset);
    j["groups"] = groups_json(report.dataset);
    j["curves"] = curves_json(report.dataset.curves);
    if (report.chrono) j["chrono"] = chrono_json(*report.chrono);
    if (report.attribution) j["attribution"] = attribution_json(*report.attribution);
    write_text(path, j.dump(2) + "\n");
    return;
  }
  write_text(path, items_csv(report.dataset));
  write_text(sibling(path, "_curves"), curves_csv(report.dataset.curves));
  if (report.chrono) {
    write_text(sibling(path, "_chrono"), chrono_csv(*report.chrono));
  }
  if (report.attribution) {
    write_text(sibling(path, "_attribution"), attribution_csv(*report.attribution));
  }
}

void write_report(const DatasetReport& dataset, const RunManifest& manifest,
                  const std::filesystem::path& path, ReportFormat format) {
  FullReport report;
  report.manifest = manifest;
  report.dataset = dataset;
  write_report(report, path, format);
}

void write_report(const ChronoSeries& series, const RunManifest& manifest,
                  const std::filesystem::path& path, ReportFormat format) {
  if (format == ReportFormat::Json) {
    Json j;
    j["manifest"] = manifest_json(manifest);
    j["chrono"] = chrono_json(series);
    write_text(path, j.dump(2) + "\n");
    return;
  }
  write_text(path, chrono_csv(series));
}

void write_report(const AttributionResult& attribution, const RunManifest& manifest,
                  const std::filesystem::path& path, ReportFormat format) {
  if (format == ReportFormat::Json) {
    Json j;
    j["manifest"] = manifest_json(manifest);
    j["attribution"] = attribution_json(attribution);
    write_text(path, j.dump(2) + "\n");
    return;
  }
  write_text(path, attribution_csv(attribution));
}

void emit_synth(const SynthTruth& truth, const RunManifest& manifest,
                const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);

  {
    std::ostringstream out;
    out << "subject_id,kind,year,expert\n";
    for (const Subject& s : truth.matrix.subjects) {
      out << detail::csv_field(s.id) << ',' << to_string(s.kind) << ','
          << (s.year_introduced ? std::to_string(*s.year_introduced) : "") << ','
          << (s.expert_flag ? (*s.expert_flag ? "1" : "0") : "") << '\n';
    }
    write_text(directory / "subjects.csv", out.str());
  }
  {
    std::ostringstream out;
    out << "item_id,tags\n";
    for (const ItemMeta& item : truth.matrix.items) {
      std::string joined;
      for (const std::string& tag : item.tags) {
        if (!joined.empty()) joined.push_back(';');
        joined += tag;
      }
      out << detail::csv_field(item.id) << ',' << detail::csv_field(joined) << '\n';
    }
    write_text(directory / "items.csv", out.str());
  }
  {
    std::ostringstream out;
    out << "subject_id,item_id,correct\n";
    for (const ResponseRecord& r : truth.matrix.records) {
      out << detail::csv_field(r.subject_id) << ',' << detail::csv_field(r.item_id) << ','
          << (r.correct ? '1' : '0') << '\n';
    }
    write_text(directory / "responses.csv", out.str());
  }

  IrtParameters params;
  params.skills = truth.true_skills;
  params.difficulties = truth.true_difficulties;
  params.discriminations = truth.true_discriminations;
  save_params(params, manifest, directory / "truth.json");
}

}  // namespace advscore
