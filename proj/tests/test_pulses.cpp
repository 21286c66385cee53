#include <doctest.h>

#include <cmath>
#include <sstream>

#include "jcsta/dynamics.hpp"
#include "jcsta/errors.hpp"
#include "jcsta/pulses.hpp"

using namespace jcsta;

namespace {

BaseProtocol proto(double tau, double lambda_0 = 0.0) {
  BaseProtocol p;
  p.tau = tau;
  p.lambda_0 = lambda_0;
  return p;
}

double fd(const std::function<double(double)>& f, double t, double h = 1e-5) {
  return (f(t + h) - f(t - h)) / (2 * h);
}

// Full JC Hamiltonian with the bare drive, used by the Berry oracle.
Matrix bare_h(const BaseProtocol& p, const SpaceSpec& space, double t) {
  const DriveSample s = base_eval(p, t);
  HamiltonianSchedule sched;
  sched.append(StaticJcSegment{1.0, s.omega_q, s.lambda});
  return assemble_h(sched, 0.5, space);
}

}  // namespace

TEST_CASE("base protocol endpoints and derivatives") {
  const BaseProtocol p = proto(5.0);
  const DriveSample a = base_eval(p, 0.0), b = base_eval(p, 5.0), m = base_eval(p, 2.5);
  CHECK(a.omega_q == doctest::Approx(1.5));
  CHECK(b.omega_q == doctest::Approx(0.5));
  CHECK(a.lambda == 0.0);
  CHECK(b.lambda == 0.0);
  CHECK(m.lambda == doctest::Approx(0.25));
  CHECK(a.omega_q_dot == 0.0);
  CHECK(a.omega_q_ddot == 0.0);
  for (double t : {0.3, 1.7, 2.9, 4.4}) {
    const DriveSample s = base_eval(p, t);
    CHECK(s.omega_q_dot == doctest::Approx(fd([&](double x) { return base_eval(p, x).omega_q; }, t)).epsilon(1e-7));
    CHECK(s.lambda_dot == doctest::Approx(fd([&](double x) { return base_eval(p, x).lambda; }, t)).epsilon(1e-7));
    CHECK(s.lambda_ddot ==
          doctest::Approx(fd([&](double x) { return base_eval(p, x).lambda_dot; }, t)).epsilon(1e-6));
  }
  CHECK_THROWS_AS(base_eval(p, 5.1), RangeError);
  BaseProtocol bad = p;
  bad.tau = -1;
  try {
    bad.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.path() == "base_protocol.tau");
  }
}

TEST_CASE("theta times sqrt(n+1) is the block mixing-angle rate") {
  const BaseProtocol p = proto(6.0, 0.05);
  for (int n = 0; n < 4; ++n)
    for (double t : {0.4, 2.0, 3.3, 5.1}) {
      // block CD amplitude theta sqrt(n+1) = d/dt of half the mixing angle arctan(2 lambda sqrt(n+1) / delta)
      auto angle = [&](double x) {
        const DriveSample s = base_eval(p, x);
        return 0.5 * std::atan2(2.0 * s.lambda * std::sqrt(n + 1.0), s.omega_q - p.omega);
      };
      const ThetaSample th = sta_theta(p, n, t);
      CHECK(std::abs(th.theta) * std::sqrt(n + 1.0) == doctest::Approx(std::abs(fd(angle, t))).epsilon(1e-6));
      CHECK(th.theta_dot ==
            doctest::Approx(fd([&](double x) { return sta_theta(p, n, x).theta; }, t)).epsilon(1e-6));
    }
}

TEST_CASE("LCD fields are the gauge-rotated CD drive") {
  const BaseProtocol p = proto(8.0, 0.02);
  for (int n = 0; n < 3; ++n)
    for (double t : {0.7, 3.1, 6.6}) {
      const StaSample s = StaPulse{p, n}.sample(t);
      const LcdFields f = lcd_fields(p, n, t);
      CHECK(f.lambda == doctest::Approx(std::hypot(s.base.lambda, s.theta)));
      // omega_q - tilde omega_q = d/dt arctan(theta / lambda)
      auto phi = [&](double x) {
        const StaSample q = StaPulse{p, n}.sample(x);
        return std::atan2(q.theta, q.base.lambda);
      };
      CHECK(s.base.omega_q - f.omega_q == doctest::Approx(fd(phi, t)).epsilon(1e-6));
    }
}

TEST_CASE("LCD boundary values") {
  const BaseProtocol p = proto(8.0, 0.03);
  const LcdFields a = lcd_fields(p, 2, 0.0), b = lcd_fields(p, 2, 8.0);
  CHECK(a.omega_q == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(b.omega_q == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(a.lambda == doctest::Approx(0.03).epsilon(1e-12));
  // lambda_0 = 0: endpoint value is the continuous limit
  const BaseProtocol q = proto(8.0);
  const double limit = lcd_fields(q, 0, 0.0).omega_q;
  CHECK(limit == doctest::Approx(lcd_fields(q, 0, 1e-3).omega_q).epsilon(1e-4));
  CHECK(limit == doctest::Approx(1.5 + 0.5 / 4).epsilon(1e-12));
  BaseProtocol flat = proto(8.0, 0.25);
  CHECK(lcd_fields(flat, 1, 0.0).omega_q == doctest::Approx(1.5));
}

TEST_CASE("cd_term agrees with the Berry counterdiabatic operator on the addressed block") {
  const SpaceSpec space{7, 1.0};
  const BaseProtocol p = proto(5.0, 0.05);
  const auto blocks = excitation_blocks(space);
  for (int n = 0; n < 5; ++n)
    for (double t : {0.8, 2.2, 4.1}) {
      const Matrix numeric = berry_cd_numeric([&](double x) { return bare_h(p, space, x); }, t, 1e-4, blocks);
      const Matrix analytic = cd_term(p, n, t, space);
      const std::vector<int> idx = {space.index(Spin::e, n), space.index(Spin::g, n + 1)};
      Matrix a(2, 2), b(2, 2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          a(i, j) = analytic(idx[i], idx[j]);
          b(i, j) = numeric(idx[i], idx[j]);
        }
      CHECK((a - b).operatorNorm() <= 1e-6);
    }
}

TEST_CASE("two-level LCD reproduces the JC fields under the block mapping") {
  const BaseProtocol p = proto(8.0, 0.04);
  for (int n = 0; n <= 4; ++n)
    for (double t : {0.5, 2.5, 3.9, 7.2}) {
      const DriveSample s = base_eval(p, t);
      const double r = 2.0 * std::sqrt(n + 1.0);
      const Jet delta{-r * s.lambda, -r * s.lambda_dot, -r * s.lambda_ddot};
      const Jet lam{s.omega_q - p.omega, s.omega_q_dot, s.omega_q_ddot};
      const TwoLevelFields f = two_level_lcd(delta, lam);
      const LcdFields g = lcd_fields(p, n, t);
      CHECK(std::abs(std::abs(f.x_field) - r * g.lambda) <= 1e-8 * r * g.lambda);
      CHECK(std::abs(f.z_field - (g.omega_q - p.omega)) <= 1e-8 * std::abs(g.omega_q - p.omega));
    }
}

TEST_CASE("Gaussian pulses rotate the spin") {
  const SpaceSpec space{3, 1.0};
  GaussianPulse pi{kPi, 5.0, 1.0};
  CHECK_FALSE(pi.window_warning());
  CHECK(GaussianPulse{kPi, 2.0, 1.0}.window_warning());
  HamiltonianSchedule sched;
  sched.append(GaussianSegment{pi});
  const SystemState start = SystemState::pure(space, basis_state(space, Spin::e, 1));
  const Evolution ev = evolve_pure(start, sched, EvolutionConfig{});
  CHECK(std::norm(ev.state.vector()(space.index(Spin::g, 1))) >= 1 - 1e-6);

  HamiltonianSchedule half;
  half.append(GaussianSegment{GaussianPulse{kPi / 2, 5.0, 1.0}});
  const Evolution hv = evolve_pure(start, half, EvolutionConfig{});
  CHECK(std::norm(hv.state.vector()(space.index(Spin::g, 1))) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("Fourier fit recovers a trigonometric polynomial") {
  const double wF = 0.7;
  std::vector<double> t, x;
  for (int i = 0; i < 200; ++i) {
    t.push_back(i * 0.05);
    x.push_back(0.3 + 0.2 * std::cos(wF * t.back()) - 0.1 * std::sin(2 * wF * t.back()));
  }
  const FourierPulse f = fourier_fit(t, x, 3, wF);
  CHECK(f.c[0] == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(f.c[1] == doctest::Approx(0.2).epsilon(1e-10));
  CHECK(f.s[2] == doctest::Approx(-0.1).epsilon(1e-10));
  CHECK(f.residual < 1e-12);
  CHECK(fourier_eval(f, 1.234) == doctest::Approx(0.3 + 0.2 * std::cos(wF * 1.234) - 0.1 * std::sin(2 * wF * 1.234)));
  CHECK_THROWS_AS(fourier_fit(std::span(t).first(10), std::span(x).first(10), 3, wF), FitError);
  CHECK_THROWS_AS(fourier_fit(t, x, 3, 1e-9), FitError);
}

TEST_CASE("Fourier approximations of the LCD pulses converge") {
  const BaseProtocol p = proto(8.0);
  double prev = INFINITY;
  for (int nf : {1, 3, 5, 8}) {
    const FourierPulse f = fit_lcd_pulse(p, 0, FieldSource::omega_q_tilde, nf);
    CHECK(f.residual < prev);
    prev = f.residual;
  }
  CHECK(default_fourier_frequency(FieldSource::omega_q_tilde, 8.0) == doctest::Approx(kPi / 8));
  CHECK(default_fourier_frequency(FieldSource::lambda_tilde, 8.0) == doctest::Approx(2 * kPi / 8));
}

TEST_CASE("pulse table export") {
  std::ostringstream os;
  write_pulse_csv(os, proto(5.0), 1, 11);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,omega_q,lambda,theta,omega_q_tilde,lambda_tilde");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 11);
}
