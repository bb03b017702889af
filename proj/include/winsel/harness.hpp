#pragma once

// Experiment orchestration: presets, JNR sweeps, two-tone selection
// studies and CSV/JSON result emission.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "winsel/detector.hpp"

namespace winsel {

enum class Preset { case1, case2, case3, table2, custom };
enum class OutputFormat { csv, json };

std::string to_string(Preset p);
Preset parse_preset(const std::string& s);
std::string to_string(OutputFormat f);
OutputFormat parse_format(const std::string& s);

struct ExperimentConfig {
  Preset preset = Preset::case1;
  int n = 16;
  double snr_db = 0.0;
  double pfa = 1e-2;
  int bin = 0;
  Band<double> jammer_offset_bins{4.0, 6.0};
  std::vector<double> jnr_grid_db;
  std::vector<std::string> policies;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string output_path;
  OutputFormat output_format = OutputFormat::csv;
  NullConvention h0_convention = NullConvention::jammer_plus_noise;
  double chebyshev_atten_db = 120.0;
  double disabling_factor = 2.0;
  std::optional<std::vector<double>> hyp_jnr_db;
  // Two-tone selection study.
  std::vector<double> table2_snr2_db{5.0, 15.0, 25.0, 35.0};
  double table2_tone1_bin = 0.1;
  double table2_tone2_bin = 6.25;
  // Per-trial proposed_simple decision records (first K H1 trials per point).
  std::uint64_t decision_log_trials = 0;
  std::string decision_log_path;
};

/// -10 .. 80 dB in 2.5 dB steps.
std::vector<double> default_jnr_grid();

/// Preset parameters: N = 16, SNR = 0 dB, Pfa = 1e-2, offsets per case.
ExperimentConfig preset_config(Preset preset);

void validate(const ExperimentConfig& cfg);

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Missing keys fall back to the preset named by "preset" (default custom/case1).
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

struct ResultRow {
  std::string label;  // preset name, or two-tone case letter
  double jnr_db = 0.0;
  int bin = 0;
  std::string policy;
  std::optional<double> pd;
  std::optional<double> stderr_;
  std::optional<double> threshold;
  std::optional<double> heldout_pfa;
  std::uint64_t trials = 0;
  std::vector<double> selection_probs;
  std::uint64_t seed = 0;

  bool operator==(const ResultRow&) const = default;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<std::string> window_names;
  std::vector<ResultRow> rows;
  std::string version;
  double wall_time_s = 0.0;
};

ExperimentResult run_case(const ExperimentConfig& cfg);
ExperimentResult run_table2(const ExperimentConfig& cfg);
/// Dispatch on cfg.preset.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::string to_csv(const ExperimentResult& result);
nlohmann::json to_json(const ExperimentResult& result, const DetectorContext* ctx = nullptr);
std::vector<ResultRow> rows_from_csv(const std::string& text);
ExperimentResult result_from_json(const nlohmann::json& j);

/// Write the result to `path` in `format` (JSON carries the window catalog too).
void emit(const ExperimentResult& result, OutputFormat format, const std::string& path);

/// Window catalog records (name, N, coefficients, PSL, SNR loss, stop-band).
nlohmann::json catalog_json(const std::vector<WindowSpec>& windows);
/// Pairwise decision boundaries with their bands.
nlohmann::json boundaries_json(const DetectorContext& ctx);

std::string library_version();

}  // namespace winsel
