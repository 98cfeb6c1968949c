#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <advscore/attribution.hpp>
#include <advscore/chrono.hpp>
#include <advscore/fit.hpp>
#include <advscore/score.hpp>
#include <advscore/synth.hpp>
#include <advscore/types.hpp>

namespace advscore {

// Embedded in every output file for reproducibility: rerunning the same
// manifest reproduces byte-identical JSON.
struct RunManifest {
  std::string tool = "advscore";
  std::string version;
  std::string timestamp;  // ISO-8601 UTC; fix it explicitly for reproducible bytes
  std::uint64_t seed = 0;
  std::map<std::string, std::string> inputs;  // role -> path
  FitConfig fit;
  ScoreOptions scoring;
};

enum class ReportFormat { Json, Csv };

// Loads and fully validates the three CSV inputs:
//   responses.csv  subject_id,item_id,correct          (correct in {0,1})
//   subjects.csv   subject_id,kind,year,expert         (kind human|model,
//                  year empty for humans, expert in {0,1,empty})
//   items.csv      item_id,tags[,text,answer]          (tags ';'-separated)
// All files are UTF-8, comma-delimited, RFC-4180 quoted. Parse errors carry
// file and line; integrity violations name the offending ids.
ResponseMatrix load_matrix(const std::filesystem::path& responses_path,
                           const std::filesystem::path& subjects_path,
                           const std::filesystem::path& items_path);

// Fitted-parameters file (JSON, full round-trip precision).
void save_params(const IrtParameters& params, const RunManifest& manifest,
                 const std::filesystem::path& path);
IrtParameters load_params(const std::filesystem::path& path);

// One run's complete output.
struct FullReport {
  RunManifest manifest;
  DatasetReport dataset;
  std::optional<ChronoSeries> chrono;
  std::optional<AttributionResult> attribution;
};

// JSON is the canonical report: top-level keys manifest, dataset, items,
// groups, curves, then chrono/attribution when present. Numbers carry 10
// significant digits; key order is deterministic. CSV emits the flat
// per-item table to `path` and companions next to it (_curves, and _chrono
// / _attribution when present).
void write_report(const FullReport& report, const std::filesystem::path& path,
                  ReportFormat format);
void write_report(const DatasetReport& dataset, const RunManifest& manifest,
                  const std::filesystem::path& path, ReportFormat format);
void write_report(const ChronoSeries& series, const RunManifest& manifest,
                  const std::filesystem::path& path, ReportFormat format);
void write_report(const AttributionResult& attribution, const RunManifest& manifest,
                  const std::filesystem::path& path, ReportFormat format);

// Writes a generated truth as responses.csv / subjects.csv / items.csv in
// the formats load_matrix reads, plus truth.json in the save_params format.
void emit_synth(const SynthTruth& truth, const RunManifest& manifest,
                const std::filesystem::path& directory);

}  // namespace advscore
