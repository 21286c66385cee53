#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "jcsta/cli.hpp"
#include "jcsta/errors.hpp"

using namespace jcsta;
using nlohmann::json;

namespace {

struct Common {
  std::string config;
  std::string preset;
  std::vector<std::string> sets;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("config", c.config, "JSON config file (optional with --preset)");
  cmd->add_option("--preset", c.preset, "named parameter preset");
  cmd->add_option("--set", c.sets, "override a dotted key, e.g. base_protocol.tau=8");
  cmd->add_option("--out", c.out, "output directory (defaults to output_dir)");
}

json load_document(const Common& c) {
  json doc = json::object();
  if (!c.config.empty()) {
    std::ifstream in(c.config);
    if (!in) throw IoError("cannot read config " + c.config);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      doc = json::parse(ss.str());
    } catch (const json::exception& e) {
      throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
  }
  if (!c.preset.empty()) doc["preset"] = c.preset;
  for (const auto& s : c.sets) apply_override(doc, s);
  return doc;
}

// "a,b,c" or "start:stop:count" (inclusive, evenly spaced)
std::vector<json> parse_values(const std::string& text) {
  std::vector<json> out;
  const auto c1 = text.find(':');
  if (c1 != std::string::npos && text.find(',') == std::string::npos) {
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos) throw ConfigError("--values", "range must be start:stop:count");
    const double a = std::stod(text.substr(0, c1));
    const double b = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    const int n = std::stoi(text.substr(c2 + 1));
    if (n < 1) throw ConfigError("--values", "count must be >= 1");
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(json::parse(item));
    } catch (const json::exception&) {
      out.push_back(item);
    }
  }
  return out;
}

int run_cmd(const Common& c, bool pulses_only) {
  json doc = load_document(c);
  if (pulses_only) doc["experiment"] = "pulse_export";
  const ExperimentConfig cfg = parse_config(doc);
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentOutput out = run_experiment(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (cfg.record_runtime) out.summary["runtime_s"] = secs;
  const std::string dir = c.out.empty() ? cfg.output_dir : c.out;
  const json manifest = write_outputs(out, dir);
  std::fprintf(stderr, "%s finished in %.2f s, %zu files written to %s\n", experiment_name(cfg.experiment), secs,
               manifest["files"].size(), dir.c_str());
  json brief = out.summary;
  brief.erase("config");
  std::cout << brief.dump(2) << "\n";
  return 0;
}

int sweep_cmd(const Common& c, const std::string& axis_opt, const std::string& values_opt, int workers) {
  const ExperimentConfig cfg = parse_config(load_document(c));
  const std::string axis = !axis_opt.empty() ? axis_opt : cfg.sweep_axis.value_or("");
  if (axis.empty()) throw ConfigError("sweep.axis", "no sweep axis given");
  const std::vector<json> values = !values_opt.empty() ? parse_values(values_opt) : cfg.sweep_values;
  if (values.empty()) throw ConfigError("sweep.values", "no sweep values given");
  const SweepTable t = sweep(cfg.resolved, axis, values, workers);
  ExperimentOutput out;
  out.files["sweep.csv"] = t.to_csv();
  json rows = json::array();
  size_t failed = 0;
  for (size_t i = 0; i < values.size(); ++i) {
    rows.push_back({{"value", values[i]}, {"summary", t.summaries[i]}, {"error", t.errors[i]}});
    failed += !t.errors[i].empty();
  }
  out.summary = {{"axis", axis}, {"rows", rows}, {"failed", failed}, {"config", cfg.resolved}};
  const std::string dir = c.out.empty() ? cfg.output_dir : c.out;
  write_outputs(out, dir);
  std::cout << out.files["sweep.csv"];
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"STA pulse synthesis and Jaynes-Cummings state preparation"};
  app.require_subcommand(1);

  Common run_opts, sweep_opts, pulse_opts, validate_opts;
  auto* run = app.add_subcommand("run", "run one experiment and write its outputs");
  add_common(run, run_opts);

  auto* sw = app.add_subcommand("sweep", "run an experiment over a list of values for one config key");
  add_common(sw, sweep_opts);
  std::string axis, values;
  int workers = 0;
  sw->add_option("--axis", axis, "dotted config key to vary");
  sw->add_option("--values", values, "comma list or start:stop:count");
  sw->add_option("--workers", workers, "concurrent rows (default JC_STA_WORKERS or all cores)");

  auto* pulses = app.add_subcommand("pulses", "export LCD pulse tables");
  add_common(pulses, pulse_opts);

  auto* validate = app.add_subcommand("validate", "print the resolved configuration");
  add_common(validate, validate_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::config);
  }

  try {
    if (*run) return run_cmd(run_opts, false);
    if (*pulses) return run_cmd(pulse_opts, true);
    if (*sw) return sweep_cmd(sweep_opts, axis, values, workers);
    const ExperimentConfig cfg = parse_config(load_document(validate_opts));
    std::cout << cfg.resolved.dump(2) << "\n";
    return 0;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(ExitCode::numerical);
  }
}
