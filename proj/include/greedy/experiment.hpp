#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace greedy {

inline constexpr const char* kToolVersion = "1.0.0";

struct Table {
  std::string name;  // written as tables/<name>.csv
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;  // numbers or strings
};

struct Series {
  std::string label;
  std::vector<double> x, y, lo, hi;  // lo and hi may be empty
};

struct Plot {
  std::string name;  // written as plots/<name>.svg
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<Series> series;
};

struct ExperimentOutcome {
  nlohmann::json report;
  int exit_code = 0;
  std::uint64_t seed = 0;
  std::vector<Table> tables;
  std::vector<Plot> plots;
};

/// Validates the whole config first (SchemaError on any problem), then runs it. Exit codes:
/// 0 success, 1 a check failed, 3 a solve hit its node budget while proofs were required.
ExperimentOutcome run_experiment(const nlohmann::json& config, const std::string& subcommand,
                                 std::optional<std::uint64_t> seed_override, int jobs);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& bytes);

/// Writes report.json, tables/*.csv, plots/*.svg and manifest.json into out_dir.
void write_artifacts(const std::string& out_dir, const ExperimentOutcome& outcome,
                     const nlohmann::json& config, const std::string& subcommand, int jobs);

std::string table_csv(const Table& t);
std::string plot_svg(const Plot& p);

struct ReplayResult {
  int exit_code;  // 0 identical, 1 mismatch, 2 missing or unreadable manifest
  std::string message;
};

/// Re-runs the experiment recorded in the manifest into out_dir (default: <manifest dir>/replay)
/// and byte-compares the new report.json with the recorded one.
ReplayResult replay(const std::string& manifest_path, int jobs, std::optional<std::uint64_t> seed_override,
                    const std::optional<std::string>& out_dir);

}  // namespace greedy
