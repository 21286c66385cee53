#include <doctest.h>

#include <cmath>
#include <random>

#include "jcsta/dynamics.hpp"
#include "jcsta/errors.hpp"

using namespace jcsta;

namespace {

Matrix random_density(int dim, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Matrix x(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) x(i, j) = cplx(g(rng), g(rng));
  Matrix rho = x * x.adjoint();
  return rho / rho.trace();
}

double trace_distance(const Matrix& a, const Matrix& b) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a - b);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

BaseProtocol proto(double tau) {
  BaseProtocol p;
  p.tau = tau;
  return p;
}

HamiltonianSchedule lcd_schedule(double tau, int n) {
  HamiltonianSchedule s;
  s.append(LcdSegment{StaPulse{proto(tau), n}});
  return s;
}

}  // namespace

TEST_CASE("structured H matches the dense assembly") {
  const SpaceSpec space{9, 1.0};
  const OperatorTable ops = build_operators(space);
  const JcCoefficients c{1.3, 1.0, 0.21, -0.07, 0.4};
  const Vector psi = Vector::Random(space.dim());
  Vector out(space.dim());
  apply_h(c, space, psi, out);
  CHECK((out - dense_h(c, ops) * psi).norm() < 1e-13);
  CHECK((dense_h(c, ops) - dense_h(c, ops).adjoint()).norm() < 1e-15);
}

TEST_CASE("structured Lindblad RHS matches the dense reference") {
  const SpaceSpec space{7, 1.0};
  const OperatorTable ops = build_operators(space);
  const JcCoefficients c{0.8, 1.0, 0.3, 0.1, 0.2};
  const NoiseRates rates{0.01, 0.02, 0.03, 0.04};
  const Matrix rho = random_density(space.dim(), 3);
  Matrix out(space.dim(), space.dim());
  lindblad_rhs(c, rates, space, rho, out);
  const Matrix ref = lindblad_rhs_reference(dense_h(c, ops), jump_operators(rates, ops), rho);
  CHECK((out - ref).norm() < 1e-12);
  CHECK(std::abs(out.trace()) < 1e-12);

  // no noise: pure commutator
  lindblad_rhs(c, NoiseRates{}, space, rho, out);
  const Matrix h = dense_h(c, ops);
  CHECK((out - (-kI) * (h * rho - rho * h)).norm() < 1e-12);
}

TEST_CASE("schedule bookkeeping") {
  HamiltonianSchedule s;
  s.append(IdleSegment{2.0, 1.0});
  s.append(GaussianSegment{GaussianPulse{kPi, 3.0, 1.0}});
  CHECK(s.total_duration() == doctest::Approx(8.0));
  CHECK(s.start(1) == doctest::Approx(2.0));
  CHECK(s.locate(2.0).first == 1);
  CHECK(s.locate(1.999).first == 0);
  CHECK(s.locate(8.0).first == 1);
  CHECK(std::string(segment_name(s.segments()[1])) == "gaussian");
  CHECK_THROWS_AS((EvolutionConfig{50, true, 0.0}.validate()), ConfigError);
}

TEST_CASE("exact LCD transfer and excitation conservation") {
  const SpaceSpec space{6, 1.0};
  const SystemState start = SystemState::pure(space, basis_state(space, Spin::e, 0));
  EvolutionConfig cfg;
  cfg.sample_interval = 0.1;
  const Evolution ev = evolve_pure(start, lcd_schedule(8.0, 0), cfg);
  CHECK(std::norm(ev.state.vector()(space.index(Spin::g, 1))) >= 1 - 1e-8);
  for (const auto& s : ev.samples) CHECK(std::abs(s.excitation_number - 1.0) <= 1e-8);
  CHECK(ev.max_norm_drift < 1e-10);
}

TEST_CASE("RK4 agrees with the exponential-product oracle") {
  const SpaceSpec space{5, 1.0};
  const Vector psi = (basis_state(space, Spin::e, 1) + basis_state(space, Spin::g, 1)).normalized();
  const SystemState start = SystemState::pure(space, psi);
  HamiltonianSchedule sched = lcd_schedule(5.0, 1);
  sched.append(GaussianSegment{GaussianPulse{kPi / 2, 5.0, 1.0}});
  const Evolution ev = evolve_pure(start, sched, EvolutionConfig{});
  const SystemState ref = expm_oracle(start, sched, 400, {}, OracleOrder::magnus4);
  CHECK(1.0 - std::norm(ref.vector().dot(ev.state.vector())) <= 1e-8);
}

TEST_CASE("RK4 converges at fourth order") {
  const SpaceSpec space{4, 1.0};
  const SystemState start = SystemState::pure(space, basis_state(space, Spin::e, 0));
  HamiltonianSchedule sched;
  sched.append(JcSegment{proto(3.0)});
  const Vector ref = expm_oracle(start, sched, 2000, {}, OracleOrder::magnus4).vector();
  std::vector<double> err;
  for (int spu : {100, 200, 400}) {
    EvolutionConfig cfg{spu, false, 0.0};
    err.push_back((evolve_pure(start, sched, cfg).state.vector() - ref).norm());
  }
  const double p1 = std::log2(err[0] / err[1]), p2 = std::log2(err[1] / err[2]);
  CHECK(p1 == doctest::Approx(4.0).epsilon(0.1));
  CHECK(p2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("closed-system Lindblad equals the pure evolution") {
  const SpaceSpec space{5, 1.0};
  const SystemState start = SystemState::pure(space, basis_state(space, Spin::e, 1));
  const HamiltonianSchedule sched = lcd_schedule(4.0, 1);
  const Evolution pure = evolve_pure(start, sched, EvolutionConfig{});
  const Evolution open = evolve_lindblad(SystemState::density(space, start.to_density()), sched, NoiseRates{},
                                         EvolutionConfig{});
  CHECK(trace_distance(open.state.matrix(), pure.state.to_density()) <= 1e-8);
}

TEST_CASE("spontaneous emission decays the excited population exponentially") {
  const SpaceSpec space{3, 1.0};
  HamiltonianSchedule sched;
  sched.append(IdleSegment{4.0, 1.0});
  const double gamma = 0.3;
  const SystemState start = SystemState::density(space, basis_state(space, Spin::e, 0) *
                                                            basis_state(space, Spin::e, 0).adjoint());
  EvolutionConfig cfg;
  cfg.sample_interval = 0.5;
  const Evolution ev = evolve_lindblad(start, sched, NoiseRates{gamma, 0, 0, 0}, cfg);
  for (const auto& s : ev.samples) CHECK(std::abs(s.excited_population - std::exp(-gamma * s.t)) <= 1e-6);
}

TEST_CASE("Lindblad integration agrees with the superoperator exponential") {
  const SpaceSpec space{4, 1.0};
  const SystemState start = SystemState::density(space, random_density(space.dim(), 11));
  HamiltonianSchedule sched = lcd_schedule(3.0, 0);
  sched.append(GaussianSegment{GaussianPulse{kPi, 2.0, 0.5}});
  const NoiseRates rates{0.01, 0.005, 0.02, 0.01};
  const Evolution ev = evolve_lindblad(start, sched, rates, EvolutionConfig{});
  const SystemState ref = expm_oracle(start, sched, 200, rates, OracleOrder::magnus4);
  CHECK(trace_distance(ev.state.matrix(), ref.matrix()) <= 1e-7);
  ev.state.check_invariants();
}

TEST_CASE("ensemble evolution of a mixed start equals the density evolution") {
  const SpaceSpec space{5, 1.0};
  const SystemState start = thermal_state(1.0, space);
  const HamiltonianSchedule sched = lcd_schedule(3.0, 0);
  const EnsembleEvolution ens = evolve_ensemble(Ensemble::from_state(start), sched, EvolutionConfig{});
  const Evolution dens = evolve_lindblad(start, sched, NoiseRates{}, EvolutionConfig{});
  CHECK(trace_distance(ens.ensemble.density(), dens.state.matrix()) <= 1e-9);
}

TEST_CASE("checkpoints land on requested times") {
  const SpaceSpec space{4, 1.0};
  const SystemState start = SystemState::pure(space, basis_state(space, Spin::e, 0));
  const std::vector<double> cps = {1.2345, 2.5};
  const Evolution ev = evolve_pure(start, lcd_schedule(5.0, 0), EvolutionConfig{}, cps);
  REQUIRE(ev.checkpoints.size() == 2);
  CHECK(ev.checkpoints[0].t == doctest::Approx(1.2345).epsilon(1e-14));
  CHECK(ev.checkpoints[1].spin_purity == doctest::Approx(0.5).epsilon(1e-8));
}
