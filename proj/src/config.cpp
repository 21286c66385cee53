#include <fstream>
#include <sstream>

#include "jcsta/cli.hpp"
#include "jcsta/errors.hpp"

namespace jcsta {

using nlohmann::json;

const char* experiment_name(ExperimentKind k) {
  static const char* names[] = {"fock",   "cat", "photon_shift", "pulse_export", "robustness_fourier",
                                "robustness_noise", "thermal_sweep"};
  return names[static_cast<int>(k)];
}

json default_config() {
  return json::parse(R"({
    "experiment": "fock",
    "preset": null,
    "space": {"fock_dim": 30, "omega": 1.0},
    "base_protocol": {"omega_q_start": 1.5, "omega_q_end": 0.5, "lambda_0": 0.0, "lambda_m": 0.25, "tau": 5.0},
    "pulse": {"t_pi": 5.0, "sigma_pi": 1.0},
    "N": 1,
    "n_low": 0,
    "n_high": 4,
    "alpha": 0.75,
    "beta_th": null,
    "repetitions": 1,
    "measure": "e",
    "drive": "lcd",
    "baselines": [],
    "target": "cat",
    "noise": {"gamma_sm": 0.0, "gamma_sz": 0.0, "gamma_a": 0.0, "gamma_ad": 0.0, "scope": "all"},
    "fourier": {"enabled": false, "n_modes": 8, "omega_F": null, "samples": 512, "modes": [1, 2, 3, 4, 5, 6, 7, 8]},
    "evolution": {"steps_per_unit": 2000, "renormalize": true, "sample_interval": 0.05},
    "wigner": {"enabled": true, "extent": 5.0, "resolution": 201},
    "noise_sweep": {"channels": ["sm", "sz", "a", "ad"], "rates": [1e-5, 1e-4, 1e-3, 1e-2, 1e-1]},
    "thermal_sweep": {"N": [1, 2, 5], "n_th": [0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1]},
    "pulse_export": {"samples": 1001, "n_ref": [0, 1, 2, 3]},
    "sweep": {"axis": null, "values": []},
    "output_dir": "out",
    "leak_tolerance": 1e-6,
    "record_runtime": false
  })");
}

namespace {

void merge(json& dst, const json& src, const std::string& path) {
  if (!src.is_object()) throw ConfigError(path.empty() ? "config" : path, "expected an object");
  for (auto it = src.begin(); it != src.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!dst.contains(it.key())) throw ConfigError(key, "unknown key");
    json& d = dst[it.key()];
    if (d.is_object()) merge(d, it.value(), key);
    else d = it.value();
  }
}

const json& at(const json& doc, const std::string& path) {
  const json* cur = &doc;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) cur = &cur->at(part);
  return *cur;
}

template <class T>
T get(const json& doc, const std::string& path) {
  const json& v = at(doc, path);
  try {
    if constexpr (std::is_same_v<T, int>) {
      if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
    } else if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ConfigError(path, "expected a number");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(path, "expected a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(path, "expected a string");
    }
    return v.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path, e.what());
  }
}

template <class T>
std::vector<T> get_list(const json& doc, const std::string& path) {
  const json& v = at(doc, path);
  if (!v.is_array()) throw ConfigError(path, "expected a list");
  std::vector<T> out;
  for (size_t i = 0; i < v.size(); ++i) {
    json wrap = {{"x", v[i]}};
    out.push_back(get<T>(wrap, "x"));
  }
  return out;
}

ExperimentKind kind_from(const std::string& s, const std::string& path) {
  for (int k = 0; k <= static_cast<int>(ExperimentKind::thermal_sweep); ++k)
    if (s == experiment_name(static_cast<ExperimentKind>(k))) return static_cast<ExperimentKind>(k);
  throw ConfigError(path, "unknown experiment kind '" + s + "'");
}

void require(bool ok, const std::string& path, const std::string& msg) {
  if (!ok) throw ConfigError(path, msg);
}

}  // namespace

void set_path(json& doc, const std::string& path, const json& value) {
  json* cur = &doc;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw ConfigError(path, "empty path");
  for (size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!cur->is_object()) throw ConfigError(path, "not an object");
    cur = &(*cur)[parts[i]];
  }
  (*cur)[parts.back()] = value;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(assignment, "override must be key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }
  set_path(doc, key, value);
}

ExperimentConfig parse_config(const json& doc_in) {
  if (!doc_in.is_object()) throw ConfigError("config", "top level must be an object");
  json doc = default_config();
  if (doc_in.contains("preset") && !doc_in["preset"].is_null()) {
    if (!doc_in["preset"].is_string()) throw ConfigError("preset", "expected a string");
    merge(doc, preset(doc_in["preset"].get<std::string>()), "");
  }
  merge(doc, doc_in, "");

  ExperimentConfig c;
  c.resolved = doc;
  c.experiment = kind_from(get<std::string>(doc, "experiment"), "experiment");

  c.space.fock_dim = get<int>(doc, "space.fock_dim");
  c.space.omega = get<double>(doc, "space.omega");
  c.space.validate();

  c.base.omega_q_start = get<double>(doc, "base_protocol.omega_q_start");
  c.base.omega_q_end = get<double>(doc, "base_protocol.omega_q_end");
  c.base.lambda_0 = get<double>(doc, "base_protocol.lambda_0");
  c.base.lambda_m = get<double>(doc, "base_protocol.lambda_m");
  c.base.tau = get<double>(doc, "base_protocol.tau");
  c.base.omega = c.space.omega;
  c.base.validate();

  c.pulse.t_pi = get<double>(doc, "pulse.t_pi");
  c.pulse.sigma_pi = get<double>(doc, "pulse.sigma_pi");
  require(c.pulse.t_pi > 0.0, "pulse.t_pi", "must be > 0");
  require(c.pulse.sigma_pi > 0.0, "pulse.sigma_pi", "must be > 0");

  c.N = get<int>(doc, "N");
  require(c.N >= 1, "N", "must be >= 1");
  c.n_low = get<int>(doc, "n_low");
  c.n_high = get<int>(doc, "n_high");
  require(c.n_low >= 0, "n_low", "must be >= 0");
  require(c.n_high - c.n_low >= 2 && (c.n_high - c.n_low) % 2 == 0, "n_high",
          "n_high - n_low must be even and >= 2");

  const json& a = doc["alpha"];
  if (a.is_number()) c.alpha = a.get<double>();
  else if (a.is_array() && a.size() == 2 && a[0].is_number() && a[1].is_number())
    c.alpha = cplx(a[0].get<double>(), a[1].get<double>());
  else throw ConfigError("alpha", "expected a number or [re, im]");

  if (!doc["beta_th"].is_null()) {
    c.beta_th = get<double>(doc, "beta_th");
    require(*c.beta_th > 0.0, "beta_th", "must be > 0");
  }
  c.repetitions = get<int>(doc, "repetitions");
  require(c.repetitions >= 1, "repetitions", "must be >= 1");

  const std::string m = get<std::string>(doc, "measure");
  require(m == "e" || m == "g", "measure", "must be 'e' or 'g'");
  c.measure = m == "e" ? Spin::e : Spin::g;

  const std::string drive = get<std::string>(doc, "drive");
  if (drive == "lcd") c.drive = DriveMode::lcd;
  else if (drive == "cd") c.drive = DriveMode::cd;
  else if (drive == "bare") c.drive = DriveMode::bare;
  else throw ConfigError("drive", "must be lcd, cd or bare");

  c.baselines = get_list<std::string>(doc, "baselines");
  for (const auto& b : c.baselines) require(b == "bare" || b == "ti", "baselines", "entries must be bare or ti");

  c.target = kind_from(get<std::string>(doc, "target"), "target");
  require(c.target == ExperimentKind::fock || c.target == ExperimentKind::cat ||
              c.target == ExperimentKind::photon_shift,
          "target", "must be fock, cat or photon_shift");

  c.noise.gamma_sm = get<double>(doc, "noise.gamma_sm");
  c.noise.gamma_sz = get<double>(doc, "noise.gamma_sz");
  c.noise.gamma_a = get<double>(doc, "noise.gamma_a");
  c.noise.gamma_ad = get<double>(doc, "noise.gamma_ad");
  c.noise.validate();
  const std::string scope = get<std::string>(doc, "noise.scope");
  require(scope == "all" || scope == "interaction", "noise.scope", "must be all or interaction");
  c.noise_during_pulses = scope == "all";

  c.fourier_enabled = get<bool>(doc, "fourier.enabled");
  c.fourier.n_modes = get<int>(doc, "fourier.n_modes");
  require(c.fourier.n_modes >= 0, "fourier.n_modes", "must be >= 0");
  if (!doc["fourier"]["omega_F"].is_null()) {
    c.fourier.omega_F = get<double>(doc, "fourier.omega_F");
    require(*c.fourier.omega_F > 0.0, "fourier.omega_F", "must be > 0");
  }
  c.fourier.samples = get<int>(doc, "fourier.samples");
  c.fourier_modes = get_list<int>(doc, "fourier.modes");
  for (int k : c.fourier_modes) require(k >= 0, "fourier.modes", "entries must be >= 0");
  int max_modes = c.fourier.n_modes;
  for (int k : c.fourier_modes) max_modes = std::max(max_modes, k);
  require(c.fourier.samples >= 4 * (max_modes + 1), "fourier.samples", "need at least 4(N_F+1) samples");

  c.evolution.steps_per_unit = get<int>(doc, "evolution.steps_per_unit");
  c.evolution.renormalize = get<bool>(doc, "evolution.renormalize");
  c.evolution.sample_interval = get<double>(doc, "evolution.sample_interval");
  c.evolution.validate();

  c.wigner_enabled = get<bool>(doc, "wigner.enabled");
  c.wigner.extent = get<double>(doc, "wigner.extent");
  c.wigner.resolution = get<int>(doc, "wigner.resolution");
  c.wigner.validate();

  c.noise_channels = get_list<std::string>(doc, "noise_sweep.channels");
  for (const auto& ch : c.noise_channels)
    require(ch == "sm" || ch == "sz" || ch == "a" || ch == "ad" || ch == "a+ad" || ch == "all",
            "noise_sweep.channels", "unknown channel '" + ch + "'");
  c.noise_rates = get_list<double>(doc, "noise_sweep.rates");
  for (double r : c.noise_rates) require(r >= 0.0, "noise_sweep.rates", "must be >= 0");

  c.thermal_targets = get_list<int>(doc, "thermal_sweep.N");
  for (int n : c.thermal_targets) require(n >= 1, "thermal_sweep.N", "entries must be >= 1");
  c.thermal_n_th = get_list<double>(doc, "thermal_sweep.n_th");
  for (double n : c.thermal_n_th) require(n > 0.0, "thermal_sweep.n_th", "entries must be > 0");

  c.pulse_samples = get<int>(doc, "pulse_export.samples");
  require(c.pulse_samples >= 2, "pulse_export.samples", "must be >= 2");
  c.pulse_n_refs = get_list<int>(doc, "pulse_export.n_ref");
  for (int n : c.pulse_n_refs) require(n >= 0, "pulse_export.n_ref", "entries must be >= 0");

  if (!doc["sweep"]["axis"].is_null()) c.sweep_axis = get<std::string>(doc, "sweep.axis");
  if (!doc["sweep"]["values"].is_array()) throw ConfigError("sweep.values", "expected a list");
  for (const auto& v : doc["sweep"]["values"]) c.sweep_values.push_back(v);

  c.output_dir = get<std::string>(doc, "output_dir");
  c.leak_tolerance = get<double>(doc, "leak_tolerance");
  require(c.leak_tolerance > 0.0, "leak_tolerance", "must be > 0");
  c.record_runtime = get<bool>(doc, "record_runtime");
  return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("config", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace jcsta
