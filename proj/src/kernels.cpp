#include "jcsta/kernels.hpp"

#include <cmath>

#include "jcsta/errors.hpp"

namespace jcsta {

void NoiseRates::validate() const {
  const char* names[] = {"noise.gamma_sm", "noise.gamma_sz", "noise.gamma_a", "noise.gamma_ad"};
  const double vals[] = {gamma_sm, gamma_sz, gamma_a, gamma_ad};
  for (int i = 0; i < 4; ++i)
    if (!(vals[i] >= 0.0) || !std::isfinite(vals[i])) throw ConfigError(names[i], "must be >= 0");
}

Matrix dense_h(const JcCoefficients& c, const OperatorTable& ops) {
  const cplx k(c.coupling, c.cd);
  Matrix h = 0.5 * c.omega_q * ops.Sz + c.mode * ops.space.omega * ops.Num;
  h += std::conj(k) * (ops.A * ops.Sp) + k * (ops.Adag * ops.Sm);
  h += c.drive_x * ops.Sx;
  return h;
}

void apply_h(const JcCoefficients& c, const SpaceSpec& space, const Vector& in, Vector& out) {
  const int d = space.fock_dim;
  const double w = c.mode * space.omega;
  const double hz = 0.5 * c.omega_q;
  const cplx k(c.coupling, c.cd);
  const cplx kc = std::conj(k);
  const cplx* g = in.data();
  const cplx* e = in.data() + d;
  out.resize(in.size());
  cplx* og = out.data();
  cplx* oe = out.data() + d;
  for (int n = 0; n < d; ++n) {
    og[n] = (w * n - hz) * g[n] + c.drive_x * e[n];
    oe[n] = (w * n + hz) * e[n] + c.drive_x * g[n];
  }
  for (int n = 0; n + 1 < d; ++n) {
    const double r = std::sqrt(static_cast<double>(n + 1));
    og[n + 1] += k * r * e[n];
    oe[n] += kc * r * g[n + 1];
  }
}

void lindblad_rhs(const JcCoefficients& c, const NoiseRates& rates, const SpaceSpec& space, const Matrix& rho,
                  Matrix& out) {
  const int d = space.fock_dim;
  const int dim = 2 * d;
  out.resize(dim, dim);

  Matrix hr(dim, dim);
#pragma omp parallel for schedule(static) if (dim >= 64)
  for (int j = 0; j < dim; ++j) {
    Vector col = rho.col(j);
    Vector tmp;
    apply_h(c, space, col, tmp);
    hr.col(j) = tmp;
  }

  const double gsm = rates.gamma_sm, gsz = rates.gamma_sz, ga = rates.gamma_a, gad = rates.gamma_ad;
#pragma omp parallel for schedule(static) if (dim >= 64)
  for (int j = 0; j < dim; ++j) {
    const int sj = j / d, nj = j % d;
    const double mj = nj + 1 < d ? nj + 1.0 : 0.0;
    for (int i = 0; i < dim; ++i) {
      const int si = i / d, ni = i % d;
      // -i (H rho - rho H) with rho H = (H rho)^dag
      cplx v = -kI * (hr(i, j) - std::conj(hr(j, i)));
      const cplx r = rho(i, j);
      if (gsm > 0.0) {
        if (si == 0 && sj == 0) v += gsm * rho(i + d, j + d);
        v -= 0.5 * gsm * (si + sj) * r;
      }
      if (gsz > 0.0 && si != sj) v -= 2.0 * gsz * r;
      if (ga > 0.0) {
        if (ni + 1 < d && nj + 1 < d) v += ga * std::sqrt((ni + 1.0) * (nj + 1.0)) * rho(i + 1, j + 1);
        v -= 0.5 * ga * (ni + nj) * r;
      }
      if (gad > 0.0) {
        if (ni > 0 && nj > 0) v += gad * std::sqrt(static_cast<double>(ni) * nj) * rho(i - 1, j - 1);
        const double mi = ni + 1 < d ? ni + 1.0 : 0.0;
        v -= 0.5 * gad * (mi + mj) * r;
      }
      out(i, j) = v;
    }
  }
}

std::vector<std::pair<double, Matrix>> jump_operators(const NoiseRates& rates, const OperatorTable& ops) {
  std::vector<std::pair<double, Matrix>> jumps;
  if (rates.gamma_sm > 0.0) jumps.emplace_back(rates.gamma_sm, ops.Sm);
  if (rates.gamma_sz > 0.0) jumps.emplace_back(rates.gamma_sz, ops.Sz);
  if (rates.gamma_a > 0.0) jumps.emplace_back(rates.gamma_a, ops.A);
  if (rates.gamma_ad > 0.0) jumps.emplace_back(rates.gamma_ad, ops.Adag);
  return jumps;
}

Matrix lindblad_rhs_reference(const Matrix& h, const std::vector<std::pair<double, Matrix>>& jumps,
                              const Matrix& rho) {
  Matrix out = -kI * (h * rho - rho * h);
  for (const auto& [gamma, a] : jumps) {
    const Matrix ada = a.adjoint() * a;
    out += gamma * (a * rho * a.adjoint() - 0.5 * (ada * rho + rho * ada));
  }
  return out;
}

}  // namespace jcsta
