#pragma once

// Configuration, experiment orchestration, sweeps and file emission.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "jcsta/kernels.hpp"
#include "jcsta/observables.hpp"
#include "jcsta/protocols.hpp"

namespace jcsta {

enum class ExperimentKind { fock, cat, photon_shift, pulse_export, robustness_fourier, robustness_noise, thermal_sweep };

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::fock;
  SpaceSpec space;
  BaseProtocol base;
  PulseShape pulse;

  int N = 1;
  int n_low = 0;
  int n_high = 4;
  cplx alpha = 0.75;
  std::optional<double> beta_th;
  int repetitions = 1;
  Spin measure = Spin::e;
  DriveMode drive = DriveMode::lcd;
  std::vector<std::string> baselines;
  ExperimentKind target = ExperimentKind::cat;

  NoiseRates noise;
  bool noise_during_pulses = true;
  bool fourier_enabled = false;
  FourierOptions fourier;
  std::vector<int> fourier_modes;
  EvolutionConfig evolution;
  WignerSpec wigner;
  bool wigner_enabled = true;

  std::vector<std::string> noise_channels;
  std::vector<double> noise_rates;
  std::vector<int> thermal_targets;
  std::vector<double> thermal_n_th;
  int pulse_samples = 1001;
  std::vector<int> pulse_n_refs;

  std::optional<std::string> sweep_axis;
  std::vector<nlohmann::json> sweep_values;

  std::string output_dir = "out";
  double leak_tolerance = kDefaultLeakTolerance;
  bool record_runtime = false;

  nlohmann::json resolved;  // fully defaulted document this config was built from
};

const char* experiment_name(ExperimentKind k);

// Defaults document; every accepted key appears here.
nlohmann::json default_config();
std::vector<std::string> preset_names();
nlohmann::json preset(const std::string& name);

// Merge onto defaults (and the named preset, if any), validate, convert.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Set a dotted path; the value text is parsed as JSON, falling back to a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);
void set_path(nlohmann::json& doc, const std::string& path, const nlohmann::json& value);

struct ExperimentOutput {
  nlohmann::json summary;
  std::map<std::string, std::string> files;  // relative name -> contents
};

ExperimentOutput run_experiment(const ExperimentConfig& cfg);

struct SweepTable {
  std::string axis;
  std::vector<nlohmann::json> values;
  std::vector<nlohmann::json> summaries;  // null on failure
  std::vector<std::string> errors;        // empty on success
  std::string to_csv() const;
};

// Runs the resolved document with `axis` set to each value; rows keep input order.
SweepTable sweep(const nlohmann::json& resolved, const std::string& axis, const std::vector<nlohmann::json>& values,
                 int workers = 0);
int default_workers();

// Writes every file plus summary.json and manifest.json (SHA-256 per file).
nlohmann::json write_outputs(const ExperimentOutput& out, const std::filesystem::path& dir);
std::string sha256_hex(const std::string& data);

}  // namespace jcsta
