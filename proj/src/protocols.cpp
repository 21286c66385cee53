#include "jcsta/protocols.hpp"

#include <cmath>

#include "jcsta/errors.hpp"
#include "jcsta/observables.hpp"

namespace jcsta {

SystemState InitialState::build(const SpaceSpec& space) const {
  switch (kind) {
    case Kind::fock:
      return SystemState::pure(space, basis_state(space, spin, n));
    case Kind::coherent:
      return coherent_state(alpha, space, spin);
    case Kind::thermal:
      return thermal_state(beta_th, space, spin);
  }
  throw std::logic_error("unknown initial state kind");
}

namespace {

double step_duration(const ProtocolStep& step, const PulseShape& pulse) {
  if (const auto* s = std::get_if<StaStep>(&step)) return s->base.tau;
  if (std::holds_alternative<PulseStep>(step)) return 2.0 * pulse.t_pi;
  if (const auto* s = std::get_if<StaticJcStep>(&step)) return s->duration;
  return 0.0;
}

void require_dim(const SpaceSpec& space, int top, const char* what) {
  if (space.fock_dim <= top + 2)
    throw ConfigError("space.fock_dim", std::string(what) + " needs fock_dim > " + std::to_string(top + 2));
}

}  // namespace

double ProtocolPlan::duration() const {
  double t = 0.0;
  for (const auto& s : steps) t += step_duration(s, pulse);
  return t;
}

nlohmann::json ProtocolPlan::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  const char* kinds[] = {"fock", "coherent", "thermal"};
  j["initial"] = {{"kind", kinds[static_cast<int>(initial.kind)]},
                  {"spin", initial.spin == Spin::e ? "e" : "g"},
                  {"n", initial.n},
                  {"alpha", {initial.alpha.real(), initial.alpha.imag()}},
                  {"beta_th", initial.beta_th}};
  j["pulse"] = {{"t_pi", pulse.t_pi}, {"sigma_pi", pulse.sigma_pi}};
  j["cycle_time"] = cycle_time();
  j["duration"] = duration();
  auto& arr = j["steps"] = nlohmann::json::array();
  for (const auto& s : steps) {
    if (const auto* x = std::get_if<StaStep>(&s))
      arr.push_back({{"kind", "sta"}, {"n_ref", x->n_ref}, {"tau", x->base.tau}});
    else if (const auto* x = std::get_if<PulseStep>(&s))
      arr.push_back({{"kind", "pulse"}, {"angle", x->angle}});
    else if (const auto* x = std::get_if<MeasureStep>(&s))
      arr.push_back({{"kind", "measure"}, {"outcome", x->outcome == Spin::e ? "e" : "g"}});
    else if (const auto* x = std::get_if<StaticJcStep>(&s))
      arr.push_back({{"kind", "static_jc"}, {"n_ref", x->n_ref}, {"duration", x->duration},
                     {"omega_q", x->omega_q}, {"lambda", x->lambda}});
  }
  return j;
}

ProtocolPlan plan_fock(int N, const BaseProtocol& proto, const PulseShape& pulse, const SpaceSpec& space) {
  if (N < 1) throw ConfigError("N", "must be >= 1");
  require_dim(space, N, "Fock target");
  ProtocolPlan p;
  p.name = "fock";
  p.initial = {InitialState::Kind::fock, Spin::e, 0, 0.0, 0.0};
  p.pulse = pulse;
  p.tau = proto.tau;
  for (int k = 0; k < N; ++k) {
    p.steps.push_back(StaStep{k, proto});
    p.steps.push_back(PulseStep{kPi});
  }
  return p;
}

namespace {

void check_cat(int n_low, int n_high) {
  if (n_low < 0) throw ConfigError("n_low", "must be >= 0");
  if (n_high - n_low < 2 || (n_high - n_low) % 2 != 0)
    throw ConfigError("n_high", "n_high - n_low must be even and >= 2");
}

}  // namespace

ProtocolPlan plan_cat(int n_low, int n_high, const BaseProtocol& proto, const PulseShape& pulse, Spin measure,
                      const SpaceSpec& space) {
  check_cat(n_low, n_high);
  require_dim(space, n_high, "cat target");
  const int N = (n_low + n_high) / 2;
  const int k = (n_high - n_low) / 2;
  ProtocolPlan p;
  p.name = "cat";
  p.initial = {InitialState::Kind::fock, Spin::e, N, 0.0, 0.0};
  p.pulse = pulse;
  p.tau = proto.tau;
  p.steps.push_back(PulseStep{kPi / 2});
  for (int j = 0; j < k; ++j) {
    // shared waveform tuned to the rung just above the lower addressed subspace
    p.steps.push_back(StaStep{N - j, proto});
    if (j + 1 < k) p.steps.push_back(PulseStep{kPi});
  }
  p.steps.push_back(PulseStep{kPi / 2});
  p.steps.push_back(MeasureStep{measure});
  return p;
}

ProtocolPlan plan_cat_time_independent(int n_low, int n_high, double lambda, const PulseShape& pulse, Spin measure,
                                       const SpaceSpec& space) {
  check_cat(n_low, n_high);
  require_dim(space, n_high, "cat target");
  if (!(lambda > 0.0)) throw ConfigError("base_protocol.lambda_m", "must be > 0 for the static baseline");
  const int N = (n_low + n_high) / 2;
  const int k = (n_high - n_low) / 2;
  ProtocolPlan p;
  p.name = "cat_time_independent";
  p.initial = {InitialState::Kind::fock, Spin::e, N, 0.0, 0.0};
  p.pulse = pulse;
  p.steps.push_back(PulseStep{kPi / 2});
  for (int j = 0; j < k; ++j) {
    const int n = N - j;
    const double t = kPi / (2.0 * lambda * std::sqrt(n + 1.0));
    p.steps.push_back(StaticJcStep{n, t, space.omega, lambda});
    if (j + 1 < k) p.steps.push_back(PulseStep{kPi});
  }
  p.steps.push_back(PulseStep{kPi / 2});
  p.steps.push_back(MeasureStep{measure});
  return p;
}

ProtocolPlan plan_photon_shift(int repetitions, const BaseProtocol& proto, const PulseShape& pulse,
                               const InitialState& initial, const SpaceSpec& space) {
  if (repetitions < 1) throw ConfigError("repetitions", "must be >= 1");
  if (initial.kind == InitialState::Kind::fock && initial.n != 0)
    throw ConfigError("initial", "photon shift starts from |e,alpha> or a thermal state");
  if (!initial.build(space).truncation_safe())
    throw TruncationError("initial state populates the top Fock level; raise space.fock_dim");
  ProtocolPlan p;
  p.name = "photon_shift";
  p.initial = initial;
  p.pulse = pulse;
  p.tau = proto.tau;
  for (int k = 0; k < repetitions; ++k) {
    p.steps.push_back(StaStep{k, proto});
    p.steps.push_back(PulseStep{kPi});
  }
  return p;
}

HamiltonianSchedule step_schedule(const ProtocolStep& step, const PulseShape& pulse, const RunOptions& opts) {
  HamiltonianSchedule sched;
  if (const auto* s = std::get_if<StaStep>(&step)) {
    const StaPulse sta{s->base, s->n_ref};
    if (opts.fourier) {
      const FourierOptions& f = *opts.fourier;
      FourierPulse wq = fit_lcd_pulse(s->base, s->n_ref, FieldSource::omega_q_tilde, f.n_modes, f.omega_F, f.samples);
      FourierPulse lam = fit_lcd_pulse(s->base, s->n_ref, FieldSource::lambda_tilde, f.n_modes, f.omega_F, f.samples);
      sched.append(FourierLcdSegment{std::move(wq), std::move(lam), s->base.tau});
    } else if (opts.drive == DriveMode::lcd) {
      sched.append(LcdSegment{sta});
    } else if (opts.drive == DriveMode::cd) {
      sched.append(JcPlusCdSegment{sta});
    } else {
      sched.append(JcSegment{s->base});
    }
  } else if (const auto* s = std::get_if<PulseStep>(&step)) {
    sched.append(GaussianSegment{GaussianPulse{s->angle, pulse.t_pi, pulse.sigma_pi}});
  } else if (const auto* s = std::get_if<StaticJcStep>(&step)) {
    sched.append(StaticJcSegment{s->duration, s->omega_q, s->lambda});
  }
  return sched;
}

namespace {

// Pure ensemble when noise-free, density matrix otherwise.
struct Track {
  std::optional<Ensemble> ens;
  std::optional<SystemState> rho;

  TimeSample observe(double t) const { return ens ? ens->observe(t) : jcsta::observe(*rho, t); }
  SystemState state() const { return ens ? ens->to_state() : *rho; }
  double population(int idx) const {
    if (rho) return rho->matrix()(idx, idx).real();
    double p = 0.0;
    for (size_t k = 0; k < ens->members.size(); ++k) p += ens->weights[k] * std::norm(ens->members[k](idx));
    return p;
  }
};

double measure(Track& tr, Spin r) {
  if (tr.rho) {
    Measurement m = project_spin(*tr.rho, r);
    tr.rho = std::move(m.state);
    return m.probability;
  }
  Ensemble& e = *tr.ens;
  const int d = e.space.fock_dim;
  const int off = e.space.index(r, 0);
  Ensemble out{e.space, {}, {}};
  double total = 0.0, norm = 0.0;
  for (size_t k = 0; k < e.members.size(); ++k) {
    norm += e.weights[k];
    Vector v = Vector::Zero(e.space.dim());
    v.segment(off, d) = e.members[k].segment(off, d);
    const double p = v.squaredNorm();
    total += e.weights[k] * p;
    if (p > 1e-300) {
      out.weights.push_back(e.weights[k] * p);
      out.members.push_back(v / std::sqrt(p));
    }
  }
  const double prob = total / norm;
  if (prob < 1e-12) throw MeasurementError("spin outcome has zero probability");
  for (double& w : out.weights) w /= total;
  e = std::move(out);
  return prob;
}

}  // namespace

ProtocolResult run_plan(const ProtocolPlan& plan, const SpaceSpec& space, const RunOptions& opts) {
  space.validate();
  opts.evolution.validate();
  const bool noisy = opts.noise && opts.noise->any();
  const SystemState init = plan.initial.build(space);

  Track tr;
  if (noisy) tr.rho = SystemState::density(space, init.to_density());
  else tr.ens = Ensemble::from_state(init);

  ProtocolResult res{init, {}, {}, {}, {}, plan.duration(), 0.0};
  const bool sampling = opts.evolution.sample_interval > 0.0;
  if (sampling) res.series.push_back(tr.observe(0.0));

  double t0 = 0.0;
  for (size_t i = 0; i < plan.steps.size(); ++i) {
    const ProtocolStep& step = plan.steps[i];
    const std::string tag = "step" + std::to_string(i);
    if (const auto* m = std::get_if<MeasureStep>(&step)) {
      res.probabilities.push_back(measure(tr, m->outcome));
      res.checkpoints.push_back({tag + "_measure", tr.observe(t0)});
      continue;
    }
    const HamiltonianSchedule sched = step_schedule(step, plan.pulse, opts);
    const double dur = sched.total_duration();
    const bool sta = std::holds_alternative<StaStep>(step) || std::holds_alternative<StaticJcStep>(step);
    std::vector<double> cps;
    if (sta) cps.push_back(0.5 * dur);
    cps.push_back(dur);

    std::vector<TimeSample> samples, checks;
    if (tr.ens) {
      EnsembleEvolution ev = evolve_ensemble(*tr.ens, sched, opts.evolution, cps);
      tr.ens = std::move(ev.ensemble);
      samples = std::move(ev.samples);
      checks = std::move(ev.checkpoints);
    } else {
      const bool quiet = !opts.noise_during_pulses && std::holds_alternative<PulseStep>(step);
      Evolution ev = evolve_lindblad(*tr.rho, sched, quiet ? NoiseRates{} : *opts.noise, opts.evolution, cps);
      tr.rho = std::move(ev.state);
      samples = std::move(ev.samples);
      checks = std::move(ev.checkpoints);
    }
    for (size_t k = 1; k < samples.size(); ++k) {
      samples[k].t += t0;
      res.series.push_back(samples[k]);
    }
    const char* kind = sta ? "sta" : "pulse";
    for (size_t k = 0; k < checks.size(); ++k) {
      checks[k].t += t0;
      const bool end = k + 1 == checks.size();
      res.checkpoints.push_back({tag + "_" + kind + (end ? "_end" : "_mid"), checks[k]});
    }
    if (const auto* s = std::get_if<StaStep>(&step)) {
      const int target = s->n_ref + 1;
      res.rung_transfer.push_back(target < space.fock_dim ? tr.population(space.index(Spin::g, target)) : 0.0);
    }
    const SystemState now = tr.state();
    res.max_leak = std::max(res.max_leak, now.top_level_population() / std::max(now.trace(), 1e-300));
    if (res.max_leak > opts.leak_tolerance)
      throw TruncationError("top Fock level population " + std::to_string(res.max_leak) +
                            " exceeds leak tolerance; raise space.fock_dim");
    t0 += dur;
  }
  res.final_state = tr.state();
  return res;
}

double extract_phase(const Vector& psi, int n_low, int n_high) {
  if (n_low < 0 || n_high >= psi.size()) throw DimensionError("extract_phase: index outside truncation");
  const cplx lo = psi(n_low), hi = psi(n_high);
  if (std::abs(lo) < 1e-6 || std::abs(hi) < 1e-6) throw NumericalError("extract_phase: amplitude underflow");
  double phi = std::arg(hi) - std::arg(lo);
  phi = std::fmod(phi, 2.0 * kPi);
  if (phi < 0) phi += 2.0 * kPi;
  return phi;
}

double extract_phase(const Matrix& rho, int n_low, int n_high) {
  if (n_low < 0 || n_high >= rho.rows()) throw DimensionError("extract_phase: index outside truncation");
  const double pl = rho(n_low, n_low).real(), ph = rho(n_high, n_high).real();
  if (pl < 1e-12 || ph < 1e-12) throw NumericalError("extract_phase: amplitude underflow");
  double phi = std::arg(rho(n_high, n_low));
  if (phi < 0) phi += 2.0 * kPi;
  return phi;
}

Vector cat_target(int n_low, int n_high, double phi, int d) {
  Vector v = Vector::Zero(d);
  v(n_low) = 1.0 / std::sqrt(2.0);
  v(n_high) = std::polar(1.0 / std::sqrt(2.0), phi);
  return v;
}

}  // namespace jcsta
