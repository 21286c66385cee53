#include <cmath>

#include "jcsta/errors.hpp"
#include "jcsta/pulses.hpp"

namespace jcsta {

FourierPulse fourier_fit(std::span<const double> t, std::span<const double> x, int n_modes, double omega_F,
                         FieldSource source) {
  if (n_modes < 0) throw ConfigError("fourier.n_modes", "must be >= 0");
  if (!(omega_F > 0.0)) throw ConfigError("fourier.omega_F", "must be > 0");
  if (t.size() != x.size()) throw DimensionError("fourier_fit: sample arrays differ in length");
  const int m = static_cast<int>(t.size());
  if (m < 4 * (n_modes + 1)) throw FitError("fourier_fit: need at least 4(N_F+1) samples");

  const int cols = 2 * n_modes + 1;
  Eigen::MatrixXd A(m, cols);
  Eigen::VectorXd y(m);
  for (int i = 0; i < m; ++i) {
    A(i, 0) = 1.0;
    for (int k = 1; k <= n_modes; ++k) {
      A(i, 2 * k - 1) = std::cos(k * omega_F * t[i]);
      A(i, 2 * k) = std::sin(k * omega_F * t[i]);
    }
    y(i) = x[i];
  }
  const Eigen::MatrixXd G = A.transpose() * A;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  const double cond = lo > 0.0 ? hi / lo : INFINITY;
  if (cond > 1e12) throw FitError("fourier_fit: ill-conditioned normal equations");

  const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(y);
  FourierPulse fp;
  fp.n_modes = n_modes;
  fp.omega_F = omega_F;
  fp.source = source;
  fp.condition = cond;
  fp.c.assign(n_modes + 1, 0.0);
  fp.s.assign(n_modes + 1, 0.0);
  fp.c[0] = coef(0);
  for (int k = 1; k <= n_modes; ++k) {
    fp.c[k] = coef(2 * k - 1);
    fp.s[k] = coef(2 * k);
  }
  fp.residual = std::sqrt((A * coef - y).squaredNorm() / m);
  return fp;
}

double fourier_eval(const FourierPulse& fp, double t) {
  double v = fp.c.empty() ? 0.0 : fp.c[0];
  for (int k = 1; k <= fp.n_modes; ++k)
    v += fp.c[k] * std::cos(k * fp.omega_F * t) + fp.s[k] * std::sin(k * fp.omega_F * t);
  return v;
}

double default_fourier_frequency(FieldSource source, double tau) {
  return source == FieldSource::lambda_tilde ? 2.0 * kPi / tau : kPi / tau;
}

FourierPulse fit_lcd_pulse(const BaseProtocol& p, int n, FieldSource source, int n_modes,
                           std::optional<double> omega_F, int samples) {
  if (source == FieldSource::other) throw ConfigError("fourier", "fit_lcd_pulse needs an LCD field source");
  if (samples < 2) throw ConfigError("fourier.samples", "must be >= 2");
  const StaPulse sta{p, n};
  std::vector<double> ts(samples), xs(samples);
  for (int i = 0; i < samples; ++i) {
    ts[i] = p.tau * i / (samples - 1);
    const StaSample s = sta.sample(ts[i]);
    xs[i] = source == FieldSource::omega_q_tilde ? s.omega_q_tilde : s.lambda_tilde;
  }
  return fourier_fit(ts, xs, n_modes, omega_F.value_or(default_fourier_frequency(source, p.tau)), source);
}

}  // namespace jcsta
