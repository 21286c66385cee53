#include "jcsta/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "jcsta/errors.hpp"
#include "jcsta/format.hpp"

namespace jcsta {

void BaseProtocol::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("base_protocol.tau", "must be > 0");
  if (!(omega > 0.0)) throw ConfigError("base_protocol.omega", "must be > 0");
  for (double v : {omega_q_start, omega_q_end, lambda_0, lambda_m})
    if (!std::isfinite(v)) throw ConfigError("base_protocol", "non-finite parameter");
}

namespace {

double local_s(const BaseProtocol& p, double t) {
  const double slack = 1e-12 * p.tau;
  if (t < -slack || t > p.tau + slack)
    throw RangeError("t=" + std::to_string(t) + " outside [0, " + std::to_string(p.tau) + "]");
  return std::clamp(t / p.tau, 0.0, 1.0);
}

}  // namespace

DriveSample base_eval(const BaseProtocol& p, double t) {
  const double s = local_s(p, t);
  const double dw = p.delta_omega_q();
  const double tau = p.tau;
  DriveSample r{};
  const double s2 = s * s, s3 = s2 * s;
  r.omega_q = p.omega_q_start + dw * s3 * (10.0 - 15.0 * s + 6.0 * s2);
  r.omega_q_dot = dw * 30.0 * s2 * (1.0 - 2.0 * s + s2) / tau;
  r.omega_q_ddot = dw * 60.0 * s * (1.0 - 3.0 * s + 2.0 * s2) / (tau * tau);

  // cos^4(pi(1+2s)/2) = sin^4(pi s); reflect so both endpoints are exact zeros
  const double sn = s <= 0.5 ? std::sin(kPi * s) : std::sin(kPi * (1.0 - s));
  const double cs = s <= 0.5 ? std::cos(kPi * s) : -std::cos(kPi * (1.0 - s));
  const double dl = p.lambda_m - p.lambda_0;
  const double k = kPi / tau;
  r.lambda = dl * sn * sn * sn * sn + p.lambda_0;
  r.lambda_dot = dl * 4.0 * sn * sn * sn * cs * k;
  r.lambda_ddot = dl * (12.0 * sn * sn * cs * cs - 4.0 * sn * sn * sn * sn) * k * k;
  return r;
}

namespace {

ThetaSample theta_from(const BaseProtocol& p, int n, const DriveSample& b) {
  const double delta = b.omega_q - p.omega;
  const double w = 4.0 * (n + 1);
  const double num = delta * b.lambda_dot - b.lambda * b.omega_q_dot;
  const double den = w * b.lambda * b.lambda + delta * delta;
  if (den < 1e-12) throw SingularError("sta_theta: Omega_n^2 + delta^2 vanishes");
  const double num_dot = delta * b.lambda_ddot - b.lambda * b.omega_q_ddot;
  const double den_dot = 2.0 * w * b.lambda * b.lambda_dot + 2.0 * delta * b.omega_q_dot;
  return {num / den, (num_dot * den - num * den_dot) / (den * den)};
}

double gauge_correction(const BaseProtocol& p, const DriveSample& b, const ThetaSample& th, double t) {
  const double den = b.lambda * b.lambda + th.theta * th.theta;
  const double num = b.lambda * th.theta_dot - th.theta * b.lambda_dot;
  if (den > 0.0) return num / den;
  if (p.lambda_m == p.lambda_0) return 0.0;  // uncoupled static drive
  const double s = t / p.tau;
  if (p.lambda_0 == 0.0 && (s <= 0.0 || s >= 1.0)) {
    // lambda ~ s^4 and theta ~ s^3 at the ends: correction tends to -delta/4
    const double delta = b.omega_q - p.omega;
    if (delta != 0.0) return -0.25 * delta;
  }
  throw SingularError("lcd_fields: lambda and theta vanish simultaneously");
}

}  // namespace

ThetaSample sta_theta(const BaseProtocol& p, int n, double t) {
  if (n < 0) throw RangeError("subspace index must be >= 0");
  return theta_from(p, n, base_eval(p, t));
}

StaSample StaPulse::sample(double t) const {
  if (n_ref < 0) throw RangeError("subspace index must be >= 0");
  StaSample r{};
  r.base = base_eval(base, t);
  const ThetaSample th = theta_from(base, n_ref, r.base);
  r.theta = th.theta;
  r.theta_dot = th.theta_dot;
  r.omega_q_tilde = r.base.omega_q - gauge_correction(base, r.base, th, t);
  r.lambda_tilde = std::hypot(r.base.lambda, th.theta);
  return r;
}

LcdFields lcd_fields(const BaseProtocol& p, int n, double t) {
  const StaSample s = StaPulse{p, n}.sample(t);
  return {s.omega_q_tilde, s.lambda_tilde};
}

Matrix cd_term(const BaseProtocol& p, int n, double t, const SpaceSpec& space) {
  const double theta = sta_theta(p, n, t).theta;
  const int d = space.fock_dim;
  Matrix h = Matrix::Zero(space.dim(), space.dim());
  for (int m = 0; m + 1 < d; ++m) {
    const double c = theta * std::sqrt(static_cast<double>(m + 1));
    const int e_m = space.index(Spin::e, m);
    const int g_m1 = space.index(Spin::g, m + 1);
    // a^dag sigma- |e,m> = sqrt(m+1) |g,m+1>
    h(g_m1, e_m) = kI * c;
    h(e_m, g_m1) = -kI * c;
  }
  return h;
}

std::vector<std::vector<int>> excitation_blocks(const SpaceSpec& space) {
  const int d = space.fock_dim;
  std::vector<std::vector<int>> blocks;
  blocks.push_back({space.index(Spin::g, 0)});
  for (int k = 1; k < d; ++k) blocks.push_back({space.index(Spin::e, k - 1), space.index(Spin::g, k)});
  blocks.push_back({space.index(Spin::e, d - 1)});
  return blocks;
}

Matrix berry_cd_numeric(const std::function<Matrix(double)>& h_of_t, double t, double dt,
                        const std::vector<std::vector<int>>& blocks) {
  const Matrix h0 = h_of_t(t);
  const Matrix hm = h_of_t(t - dt);
  const Matrix hp = h_of_t(t + dt);
  Matrix out = Matrix::Zero(h0.rows(), h0.cols());

  for (const auto& idx : blocks) {
    const int m = static_cast<int>(idx.size());
    if (m < 2) continue;
    auto sub = [&](const Matrix& h) {
      Matrix b(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) b(i, j) = h(idx[i], idx[j]);
      return b;
    };
    Matrix vec[3];
    const Matrix* hs[3] = {&hm, &h0, &hp};
    for (int k = 0; k < 3; ++k) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(sub(*hs[k]));
      const auto& ev = es.eigenvalues();
      for (int i = 0; i + 1 < m; ++i)
        if (ev(i + 1) - ev(i) < 1e-10) throw DegeneracyError("berry_cd_numeric: degenerate block spectrum");
      vec[k] = es.eigenvectors();
    }
    // gauge: neighbours aligned to positive overlap with the central eigenvectors
    for (int k : {0, 2})
      for (int i = 0; i < m; ++i) {
        const cplx ov = vec[1].col(i).dot(vec[k].col(i));
        vec[k].col(i) *= std::conj(ov) / std::abs(ov);
      }
    Matrix cd = Matrix::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      const Vector v = vec[1].col(i);
      const Vector dv = (vec[2].col(i) - vec[0].col(i)) / (2.0 * dt);
      const cplx berry = v.dot(dv);
      cd += kI * (dv * v.adjoint() - berry * v * v.adjoint());
    }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) out(idx[i], idx[j]) = cd(i, j);
  }
  return out;
}

TwoLevelFields two_level_lcd(const Jet& delta, const Jet& lambda) {
  const double D = lambda.value * lambda.value + delta.value * delta.value;
  if (D == 0.0) throw SingularError("two_level_lcd: Delta and lambda vanish");
  const double num = lambda.value * delta.d1 - delta.value * lambda.d1;
  const double num_dot = lambda.value * delta.d2 - delta.value * lambda.d2;
  const double D_dot = 2.0 * (lambda.value * lambda.d1 + delta.value * delta.d1);
  const double theta_a = num / D;
  const double theta_a_dot = (num_dot * D - num * D_dot) / (D * D);

  const double E = theta_a * theta_a + delta.value * delta.value;
  if (E == 0.0) throw SingularError("two_level_lcd: Delta and theta_a vanish");
  TwoLevelFields f{};
  const double mag = std::sqrt(E);
  f.x_field = delta.value < 0.0 ? -mag : mag;
  f.z_field = lambda.value - (delta.value * theta_a_dot - theta_a * delta.d1) / E;
  return f;
}

void GaussianPulse::validate() const {
  if (!(t_pi > 0.0)) throw ConfigError("pulse.t_pi", "must be > 0");
  if (!(sigma_pi > 0.0)) throw ConfigError("pulse.sigma_pi", "must be > 0");
  if (!std::isfinite(angle)) throw ConfigError("pulse.angle", "must be finite");
}

double gaussian_field(const GaussianPulse& pulse, double t) {
  const double slack = 1e-12 * pulse.duration();
  if (t < -slack || t > pulse.duration() + slack) throw RangeError("t outside Gaussian pulse window");
  const double x = (t - pulse.t_pi) / pulse.sigma_pi;
  return pulse.angle / (2.0 * pulse.sigma_pi * std::sqrt(2.0 * kPi)) * std::exp(-0.5 * x * x);
}

void write_pulse_csv(std::ostream& os, const BaseProtocol& p, int n, int samples) {
  if (samples < 2) throw ConfigError("samples", "must be >= 2");
  const StaPulse sta{p, n};
  os << "t,omega_q,lambda,theta,omega_q_tilde,lambda_tilde\n";
  for (int i = 0; i < samples; ++i) {
    const double t = p.tau * i / (samples - 1);
    const StaSample s = sta.sample(t);
    os << csv_row({t, s.base.omega_q, s.base.lambda, s.theta, s.omega_q_tilde, s.lambda_tilde});
  }
}

}  // namespace jcsta
