#pragma once

#include <span>
#include <variant>
#include <vector>

#include "jcsta/hilbert.hpp"
#include "jcsta/kernels.hpp"
#include "jcsta/pulses.hpp"

namespace jcsta {

// ---------------------------------------------------------------- segments

struct JcSegment {
  BaseProtocol base;
};
struct LcdSegment {
  StaPulse sta;
};
struct JcPlusCdSegment {
  StaPulse sta;
};
struct GaussianSegment {
  GaussianPulse pulse;
};
struct FourierLcdSegment {
  FourierPulse omega_q;
  FourierPulse lambda;
  double duration;
};
struct IdleSegment {
  double duration;
  double omega_q;
};
struct StaticJcSegment {
  double duration;
  double omega_q;
  double lambda;
};

using Segment = std::variant<JcSegment, LcdSegment, JcPlusCdSegment, GaussianSegment, FourierLcdSegment,
                             IdleSegment, StaticJcSegment>;

double segment_duration(const Segment& seg);
const char* segment_name(const Segment& seg);
JcCoefficients segment_coefficients(const Segment& seg, double local_t);

class HamiltonianSchedule {
 public:
  HamiltonianSchedule() = default;
  explicit HamiltonianSchedule(std::vector<Segment> segments);

  void append(Segment seg);
  const std::vector<Segment>& segments() const { return segments_; }
  double start(size_t i) const { return starts_[i]; }
  double total_duration() const { return total_; }
  bool empty() const { return segments_.empty(); }
  // Active segment index and local time; t exactly on a boundary maps to the later segment.
  std::pair<size_t, double> locate(double t) const;
  JcCoefficients coefficients(double t) const;

 private:
  std::vector<Segment> segments_;
  std::vector<double> starts_;
  double total_ = 0.0;
};

Matrix assemble_h(const HamiltonianSchedule& schedule, double t, const SpaceSpec& space);

// ---------------------------------------------------------------- evolution

struct EvolutionConfig {
  int steps_per_unit = 2000;
  bool renormalize = true;
  double sample_interval = 0.0;  // 0 disables the periodic series
  void validate() const;
  bool operator==(const EvolutionConfig&) const = default;
};

struct TimeSample {
  double t = 0.0;
  double mean_n = 0.0;
  double mandel_q = 0.0;  // NaN when <n> vanishes
  double spin_purity = 1.0;
  double excited_population = 0.0;
  double excitation_number = 0.0;
  double trace = 1.0;
};

TimeSample observe(const SystemState& state, double t);

// Weighted pure-state mixture; noise-free stand-in for a density matrix.
struct Ensemble {
  SpaceSpec space;
  std::vector<double> weights;
  std::vector<Vector> members;

  static Ensemble from_state(const SystemState& state, double cutoff = 1e-15);
  Matrix density() const;
  SystemState to_state() const;
  TimeSample observe(double t) const;
};

struct Evolution {
  SystemState state;
  std::vector<TimeSample> samples;
  std::vector<TimeSample> checkpoints;
  double max_norm_drift = 0.0;
  double min_eigenvalue = 0.0;
};

struct EnsembleEvolution {
  Ensemble ensemble;
  std::vector<TimeSample> samples;
  std::vector<TimeSample> checkpoints;
  double max_norm_drift = 0.0;
};

// Checkpoint times are absolute schedule times; each lands on a step boundary.
Evolution evolve_pure(const SystemState& state, const HamiltonianSchedule& schedule, const EvolutionConfig& cfg,
                      std::span<const double> checkpoints = {});
EnsembleEvolution evolve_ensemble(const Ensemble& ensemble, const HamiltonianSchedule& schedule,
                                  const EvolutionConfig& cfg, std::span<const double> checkpoints = {});
Evolution evolve_lindblad(const SystemState& state, const HamiltonianSchedule& schedule, const NoiseRates& rates,
                          const EvolutionConfig& cfg, std::span<const double> checkpoints = {});

enum class OracleOrder { midpoint, magnus4 };

// Product of exact exponentials of H frozen on uniform slices (superoperator exponential for densities).
SystemState expm_oracle(const SystemState& state, const HamiltonianSchedule& schedule, int slices_per_unit,
                        const NoiseRates& rates = {}, OracleOrder order = OracleOrder::midpoint);

}  // namespace jcsta
