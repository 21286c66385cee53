#include "jcsta/cli.hpp"
#include "jcsta/errors.hpp"

namespace jcsta {

namespace {

struct Named {
  const char* name;
  const char* body;
};

// Fock dimensions are the smallest that keep the top level below the leak tolerance.
const Named kPresets[] = {
    {"fig2b", R"({
      "experiment": "fock", "N": 5,
      "space": {"fock_dim": 12},
      "base_protocol": {"tau": 5.0},
      "pulse": {"t_pi": 5.0, "sigma_pi": 1.0},
      "evolution": {"sample_interval": 0.05},
      "baselines": ["bare"]
    })"},
    {"fig2d", R"({
      "experiment": "cat", "n_low": 0, "n_high": 4,
      "space": {"fock_dim": 12},
      "base_protocol": {"tau": 30.0},
      "measure": "e",
      "baselines": ["bare", "ti"]
    })"},
    {"fig3", R"({
      "experiment": "photon_shift", "alpha": 0.75, "repetitions": 1,
      "space": {"fock_dim": 40},
      "base_protocol": {"tau": 8.0},
      "evolution": {"sample_interval": 0.0}
    })"},
    {"figS5", R"({
      "experiment": "fock", "N": 1,
      "space": {"fock_dim": 8},
      "base_protocol": {"tau": 8.0},
      "baselines": ["bare"]
    })"},
    {"figS6a", R"({
      "experiment": "cat", "n_low": 0, "n_high": 2,
      "space": {"fock_dim": 8},
      "base_protocol": {"tau": 30.0},
      "measure": "g",
      "baselines": ["bare", "ti"]
    })"},
    {"figS6b", R"({
      "experiment": "cat", "n_low": 0, "n_high": 6,
      "space": {"fock_dim": 14},
      "base_protocol": {"tau": 40.0},
      "measure": "e",
      "baselines": ["bare", "ti"]
    })"},
};

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& p : kPresets) out.emplace_back(p.name);
  return out;
}

nlohmann::json preset(const std::string& name) {
  for (const auto& p : kPresets)
    if (name == p.name) return nlohmann::json::parse(p.body);
  throw ConfigError("preset", "unknown preset '" + name + "'");
}

}  // namespace jcsta
