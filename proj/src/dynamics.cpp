#include "jcsta/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "jcsta/errors.hpp"

namespace jcsta {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

double segment_duration(const Segment& seg) {
  return std::visit(overloaded{
                        [](const JcSegment& s) { return s.base.tau; },
                        [](const LcdSegment& s) { return s.sta.base.tau; },
                        [](const JcPlusCdSegment& s) { return s.sta.base.tau; },
                        [](const GaussianSegment& s) { return s.pulse.duration(); },
                        [](const FourierLcdSegment& s) { return s.duration; },
                        [](const IdleSegment& s) { return s.duration; },
                        [](const StaticJcSegment& s) { return s.duration; },
                    },
                    seg);
}

const char* segment_name(const Segment& seg) {
  static const char* names[] = {"jc", "lcd", "jc_cd", "gaussian", "fourier_lcd", "idle", "static_jc"};
  return names[seg.index()];
}

JcCoefficients segment_coefficients(const Segment& seg, double t) {
  return std::visit(overloaded{
                        [&](const JcSegment& s) {
                          const DriveSample b = base_eval(s.base, t);
                          return JcCoefficients{b.omega_q, 1.0, b.lambda, 0.0, 0.0};
                        },
                        [&](const LcdSegment& s) {
                          const StaSample x = s.sta.sample(t);
                          return JcCoefficients{x.omega_q_tilde, 1.0, x.lambda_tilde, 0.0, 0.0};
                        },
                        [&](const JcPlusCdSegment& s) {
                          const StaSample x = s.sta.sample(t);
                          return JcCoefficients{x.base.omega_q, 1.0, x.base.lambda, x.theta, 0.0};
                        },
                        [&](const GaussianSegment& s) {
                          return JcCoefficients{0.0, 0.0, 0.0, 0.0, gaussian_field(s.pulse, t)};
                        },
                        [&](const FourierLcdSegment& s) {
                          if (t < -1e-12 || t > s.duration * (1 + 1e-12)) throw RangeError("t outside Fourier segment");
                          return JcCoefficients{fourier_eval(s.omega_q, t), 1.0, fourier_eval(s.lambda, t), 0.0, 0.0};
                        },
                        [&](const IdleSegment& s) { return JcCoefficients{s.omega_q, 1.0, 0.0, 0.0, 0.0}; },
                        [&](const StaticJcSegment& s) { return JcCoefficients{s.omega_q, 1.0, s.lambda, 0.0, 0.0}; },
                    },
                    seg);
}

HamiltonianSchedule::HamiltonianSchedule(std::vector<Segment> segments) {
  for (auto& s : segments) append(std::move(s));
}

void HamiltonianSchedule::append(Segment seg) {
  const double d = segment_duration(seg);
  if (!(d > 0.0) || !std::isfinite(d)) throw ConfigError("schedule", "segment durations must be > 0");
  starts_.push_back(total_);
  total_ += d;
  segments_.push_back(std::move(seg));
}

std::pair<size_t, double> HamiltonianSchedule::locate(double t) const {
  if (segments_.empty()) throw RangeError("empty schedule");
  const double slack = 1e-12 * std::max(1.0, total_);
  if (t < -slack || t > total_ + slack) throw RangeError("t outside schedule span");
  auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
  size_t i = it == starts_.begin() ? 0 : static_cast<size_t>(it - starts_.begin()) - 1;
  double local = t - starts_[i];
  local = std::clamp(local, 0.0, segment_duration(segments_[i]));
  return {i, local};
}

JcCoefficients HamiltonianSchedule::coefficients(double t) const {
  const auto [i, local] = locate(t);
  return segment_coefficients(segments_[i], local);
}

Matrix assemble_h(const HamiltonianSchedule& schedule, double t, const SpaceSpec& space) {
  return dense_h(schedule.coefficients(t), build_operators(space));
}

void EvolutionConfig::validate() const {
  if (steps_per_unit < 100) throw ConfigError("evolution.steps_per_unit", "must be >= 100");
  if (!(sample_interval >= 0.0)) throw ConfigError("evolution.sample_interval", "must be >= 0");
}

// ---------------------------------------------------------------- observation

namespace {

struct Moments {
  double n1 = 0, n2 = 0, pe = 0, tr = 0;
  Eigen::Matrix2cd spin = Eigen::Matrix2cd::Zero();
};

void accumulate(Moments& m, const Vector& v, int d, double w) {
  for (int n = 0; n < d; ++n) {
    const double p = std::norm(v(n)) + std::norm(v(d + n));
    m.n1 += w * n * p;
    m.n2 += w * double(n) * n * p;
    m.pe += w * std::norm(v(d + n));
    m.tr += w * p;
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m.spin(i, j) += w * v.segment(j * d, d).dot(v.segment(i * d, d));
}

TimeSample finish(const Moments& m, double t) {
  TimeSample s;
  s.t = t;
  s.trace = m.tr;
  s.mean_n = m.n1 / m.tr;
  const double var = m.n2 / m.tr - s.mean_n * s.mean_n;
  s.mandel_q = s.mean_n > 1e-12 ? var / s.mean_n - 1.0 : std::numeric_limits<double>::quiet_NaN();
  const Eigen::Matrix2cd r = m.spin / m.tr;
  s.spin_purity = (r * r).trace().real();
  s.excited_population = m.pe / m.tr;
  s.excitation_number = s.mean_n + s.excited_population;
  return s;
}

}  // namespace

TimeSample observe(const SystemState& state, double t) {
  const int d = state.space().fock_dim;
  Moments m;
  if (state.is_pure()) {
    accumulate(m, state.vector(), d, 1.0);
    return finish(m, t);
  }
  const Matrix& rho = state.matrix();
  for (int n = 0; n < d; ++n) {
    const double p = rho(n, n).real() + rho(d + n, d + n).real();
    m.n1 += n * p;
    m.n2 += double(n) * n * p;
    m.pe += rho(d + n, d + n).real();
    m.tr += p;
  }
  m.spin = reduce_spin(state);
  return finish(m, t);
}

Ensemble Ensemble::from_state(const SystemState& state, double cutoff) {
  Ensemble e{state.space(), {}, {}};
  if (state.is_pure()) {
    e.weights.push_back(1.0);
    e.members.push_back(state.vector());
    return e;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(state.matrix());
  for (Eigen::Index k = es.eigenvalues().size() - 1; k >= 0; --k) {
    const double w = es.eigenvalues()(k);
    if (w > cutoff) {
      e.weights.push_back(w);
      e.members.push_back(es.eigenvectors().col(k));
    }
  }
  return e;
}

Matrix Ensemble::density() const {
  Matrix rho = Matrix::Zero(space.dim(), space.dim());
  for (size_t k = 0; k < members.size(); ++k) rho += weights[k] * members[k] * members[k].adjoint();
  return rho;
}

SystemState Ensemble::to_state() const {
  if (members.size() == 1 && std::abs(weights[0] - 1.0) < 1e-14) return SystemState::pure(space, members[0]);
  return SystemState::density(space, density());
}

TimeSample Ensemble::observe(double t) const {
  Moments m;
  for (size_t k = 0; k < members.size(); ++k) accumulate(m, members[k], space.fock_dim, weights[k]);
  return finish(m, t);
}

// ---------------------------------------------------------------- integration

namespace {

constexpr double kDriftLimit = 1e-6;

struct Breakpoint {
  double t;
  bool sample;
  bool checkpoint;
};

// Sub-interval end points inside each segment, merged from sample and checkpoint times.
std::vector<std::vector<Breakpoint>> plan_breakpoints(const HamiltonianSchedule& sched, const EvolutionConfig& cfg,
                                                      std::span<const double> checkpoints) {
  const double total = sched.total_duration();
  const double eps = 1e-9;
  std::vector<Breakpoint> pts;
  if (cfg.sample_interval > 0.0) {
    const long n = static_cast<long>(std::floor(total / cfg.sample_interval + eps));
    for (long k = 1; k <= n; ++k) pts.push_back({k * cfg.sample_interval, true, false});
  }
  for (double c : checkpoints) {
    if (c < -eps || c > total + eps) throw RangeError("checkpoint outside schedule span");
    if (c > eps) pts.push_back({std::min(c, total), false, true});
  }
  std::sort(pts.begin(), pts.end(), [](const Breakpoint& a, const Breakpoint& b) { return a.t < b.t; });

  std::vector<std::vector<Breakpoint>> per(sched.segments().size());
  size_t k = 0;
  for (size_t i = 0; i < per.size(); ++i) {
    const double a = sched.start(i);
    const double b = a + segment_duration(sched.segments()[i]);
    while (k < pts.size() && pts[k].t <= b + eps) {
      Breakpoint p = pts[k++];
      p.t = std::max(p.t, a);
      if (!per[i].empty() && std::abs(per[i].back().t - p.t) < eps) {
        per[i].back().sample |= p.sample;
        per[i].back().checkpoint |= p.checkpoint;
      } else {
        per[i].push_back(p);
      }
    }
    if (per[i].empty() || std::abs(per[i].back().t - b) >= eps) per[i].push_back({b, false, false});
    else per[i].back().t = b;
  }
  return per;
}

int step_count(double len, int steps_per_unit) {
  return std::max(1, static_cast<int>(std::ceil(len * steps_per_unit - 1e-9)));
}

// Advances psi across [t0, t1] of one segment (local times); returns max norm drift.
double rk4_pure(Vector& psi, const Segment& seg, const SpaceSpec& space, double t0, double t1, int steps,
                bool renormalize) {
  const double h = (t1 - t0) / steps;
  Vector k1, k2, k3, k4, tmp;
  double drift = 0.0;
  for (int s = 0; s < steps; ++s) {
    const double t = t0 + s * h;
    const JcCoefficients c0 = segment_coefficients(seg, t);
    const JcCoefficients cm = segment_coefficients(seg, t + 0.5 * h);
    const JcCoefficients c1 = segment_coefficients(seg, t + h);
    apply_h(c0, space, psi, k1);
    k1 *= -kI;
    tmp = psi + (0.5 * h) * k1;
    apply_h(cm, space, tmp, k2);
    k2 *= -kI;
    tmp = psi + (0.5 * h) * k2;
    apply_h(cm, space, tmp, k3);
    k3 *= -kI;
    tmp = psi + h * k3;
    apply_h(c1, space, tmp, k4);
    k4 *= -kI;
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double nrm = psi.norm();
    drift = std::max(drift, std::abs(nrm - 1.0));
    if (renormalize) psi /= nrm;
  }
  return drift;
}

void rk4_density(Matrix& rho, const Segment& seg, const SpaceSpec& space, const NoiseRates& rates, double t0,
                 double t1, int steps) {
  const double h = (t1 - t0) / steps;
  Matrix k1, k2, k3, k4, tmp;
  for (int s = 0; s < steps; ++s) {
    const double t = t0 + s * h;
    const JcCoefficients c0 = segment_coefficients(seg, t);
    const JcCoefficients cm = segment_coefficients(seg, t + 0.5 * h);
    const JcCoefficients c1 = segment_coefficients(seg, t + h);
    lindblad_rhs(c0, rates, space, rho, k1);
    tmp = rho + (0.5 * h) * k1;
    lindblad_rhs(cm, rates, space, tmp, k2);
    tmp = rho + (0.5 * h) * k2;
    lindblad_rhs(cm, rates, space, tmp, k3);
    tmp = rho + h * k3;
    lindblad_rhs(c1, rates, space, tmp, k4);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    tmp = 0.5 * (rho + rho.adjoint());
    rho = tmp;
  }
}

void check_drift(double drift) {
  if (drift > kDriftLimit)
    throw IntegrationError("norm drift " + std::to_string(drift) +
                           " exceeds 1e-6; raise evolution.steps_per_unit");
}

}  // namespace

Evolution evolve_pure(const SystemState& state, const HamiltonianSchedule& schedule, const EvolutionConfig& cfg,
                      std::span<const double> checkpoints) {
  if (!state.is_pure()) throw std::invalid_argument("evolve_pure needs a pure state");
  EnsembleEvolution r = evolve_ensemble(Ensemble::from_state(state), schedule, cfg, checkpoints);
  Evolution out{SystemState::pure(state.space(), r.ensemble.members[0]), std::move(r.samples),
                std::move(r.checkpoints), r.max_norm_drift, 0.0};
  return out;
}

EnsembleEvolution evolve_ensemble(const Ensemble& ensemble, const HamiltonianSchedule& schedule,
                                  const EvolutionConfig& cfg, std::span<const double> checkpoints) {
  cfg.validate();
  EnsembleEvolution out{ensemble, {}, {}, 0.0};
  const bool sampling = cfg.sample_interval > 0.0;
  if (sampling) out.samples.push_back(out.ensemble.observe(0.0));
  for (double c : checkpoints)
    if (std::abs(c) <= 1e-9) out.checkpoints.push_back(out.ensemble.observe(0.0));
  if (schedule.empty()) return out;

  const auto per = plan_breakpoints(schedule, cfg, checkpoints);
  const SpaceSpec& space = ensemble.space;
  auto& members = out.ensemble.members;
  const int count = static_cast<int>(members.size());
  std::vector<double> drift(count, 0.0);

  for (size_t i = 0; i < per.size(); ++i) {
    const Segment& seg = schedule.segments()[i];
    const double a = schedule.start(i);
    double prev = a;
    for (const Breakpoint& bp : per[i]) {
      if (bp.t > prev) {
        const int steps = step_count(bp.t - prev, cfg.steps_per_unit);
        std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) if (count > 1)
        for (int k = 0; k < count; ++k) {
          try {
            const double dr = rk4_pure(members[k], seg, space, prev - a, bp.t - a, steps, cfg.renormalize);
            drift[k] = std::max(drift[k], dr);
          } catch (...) {
#pragma omp critical(jcsta_ensemble_failure)
            if (!failure) failure = std::current_exception();
          }
        }
        if (failure) std::rethrow_exception(failure);
        for (double dr : drift) check_drift(dr);
        prev = bp.t;
      }
      if (bp.sample) out.samples.push_back(out.ensemble.observe(bp.t));
      if (bp.checkpoint) out.checkpoints.push_back(out.ensemble.observe(bp.t));
    }
  }
  for (double dr : drift) out.max_norm_drift = std::max(out.max_norm_drift, dr);
  return out;
}

Evolution evolve_lindblad(const SystemState& state, const HamiltonianSchedule& schedule, const NoiseRates& rates,
                          const EvolutionConfig& cfg, std::span<const double> checkpoints) {
  cfg.validate();
  rates.validate();
  const SpaceSpec space = state.space();
  Matrix rho = state.to_density();
  Evolution out{SystemState::density(space, rho), {}, {}, 0.0, 0.0};
  const bool sampling = cfg.sample_interval > 0.0;
  if (sampling) out.samples.push_back(observe(out.state, 0.0));
  for (double c : checkpoints)
    if (std::abs(c) <= 1e-9) out.checkpoints.push_back(observe(out.state, 0.0));
  if (schedule.empty()) return out;

  double min_ev = std::numeric_limits<double>::infinity();
  const auto per = plan_breakpoints(schedule, cfg, checkpoints);
  for (size_t i = 0; i < per.size(); ++i) {
    const Segment& seg = schedule.segments()[i];
    const double a = schedule.start(i);
    double prev = a;
    for (const Breakpoint& bp : per[i]) {
      if (bp.t > prev) {
        rk4_density(rho, seg, space, rates, prev - a, bp.t - a, step_count(bp.t - prev, cfg.steps_per_unit));
        prev = bp.t;
      }
      if (bp.sample || bp.checkpoint) {
        const SystemState snap = SystemState::density(space, rho);
        if (bp.sample) out.samples.push_back(observe(snap, bp.t));
        if (bp.checkpoint) out.checkpoints.push_back(observe(snap, bp.t));
      }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    min_ev = std::min(min_ev, es.eigenvalues().minCoeff());
    if (min_ev < -1e-6)
      throw IntegrationError("density lost positivity (min eigenvalue " + std::to_string(min_ev) +
                             "); raise evolution.steps_per_unit");
    const double tr_err = std::abs(rho.trace().real() - 1.0);
    out.max_norm_drift = std::max(out.max_norm_drift, tr_err);
    if (tr_err > kDriftLimit) throw IntegrationError("density trace drifted; raise evolution.steps_per_unit");
  }
  out.min_eigenvalue = min_ev;
  out.state = SystemState::density(space, std::move(rho));
  return out;
}

}  // namespace jcsta
