#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "jcsta/dynamics.hpp"
#include "jcsta/hilbert.hpp"
#include "jcsta/pulses.hpp"

namespace jcsta {

struct InitialState {
  enum class Kind { fock, coherent, thermal };
  Kind kind = Kind::fock;
  Spin spin = Spin::e;
  int n = 0;
  cplx alpha = 0.0;
  double beta_th = 0.0;

  SystemState build(const SpaceSpec& space) const;
};

struct StaStep {
  int n_ref;
  BaseProtocol base;
};
struct PulseStep {
  double angle;
};
struct MeasureStep {
  Spin outcome;
};
// Resonant static JC interaction used by the time-independent baseline.
struct StaticJcStep {
  int n_ref;
  double duration;
  double omega_q;
  double lambda;
};

using ProtocolStep = std::variant<StaStep, PulseStep, MeasureStep, StaticJcStep>;

struct PulseShape {
  double t_pi = 5.0;
  double sigma_pi = 1.0;
  bool operator==(const PulseShape&) const = default;
};

struct ProtocolPlan {
  std::string name;
  InitialState initial;
  std::vector<ProtocolStep> steps;
  PulseShape pulse;
  double tau = 0.0;

  double cycle_time() const { return tau + 2.0 * pulse.t_pi; }
  double duration() const;
  nlohmann::json to_json() const;
};

ProtocolPlan plan_fock(int N, const BaseProtocol& proto, const PulseShape& pulse, const SpaceSpec& space);
ProtocolPlan plan_cat(int n_low, int n_high, const BaseProtocol& proto, const PulseShape& pulse, Spin measure,
                      const SpaceSpec& space);
// Same pulse skeleton as plan_cat with static resonant JC transfers of length pi/(2 lambda sqrt(n+1)).
ProtocolPlan plan_cat_time_independent(int n_low, int n_high, double lambda, const PulseShape& pulse, Spin measure,
                                       const SpaceSpec& space);
ProtocolPlan plan_photon_shift(int repetitions, const BaseProtocol& proto, const PulseShape& pulse,
                               const InitialState& initial, const SpaceSpec& space);

enum class DriveMode { lcd, cd, bare };

struct FourierOptions {
  int n_modes = 8;
  std::optional<double> omega_F;  // per-field defaults when unset
  int samples = 512;
  bool operator==(const FourierOptions&) const = default;
};

struct RunOptions {
  DriveMode drive = DriveMode::lcd;
  EvolutionConfig evolution;
  std::optional<NoiseRates> noise;
  std::optional<FourierOptions> fourier;
  double leak_tolerance = kDefaultLeakTolerance;
  bool noise_during_pulses = true;  // false: spin pulses act as noise-free operations
};

struct Checkpoint {
  std::string label;
  TimeSample sample;
};

struct ProtocolResult {
  SystemState final_state;
  std::vector<double> probabilities;  // one per Measure step
  std::vector<TimeSample> series;
  std::vector<Checkpoint> checkpoints;
  std::vector<double> rung_transfer;  // |<g,n+1|psi>|^2 after each single-rung STA step
  double duration = 0.0;
  double max_leak = 0.0;
};

HamiltonianSchedule step_schedule(const ProtocolStep& step, const PulseShape& pulse, const RunOptions& opts);

ProtocolResult run_plan(const ProtocolPlan& plan, const SpaceSpec& space, const RunOptions& opts);

double extract_phase(const Vector& psi_boson, int n_low, int n_high);
double extract_phase(const Matrix& rho_boson, int n_low, int n_high);

// (|n_low> + e^{i phi}|n_high>)/sqrt(2) on d levels.
Vector cat_target(int n_low, int n_high, double phi, int d);

}  // namespace jcsta
