#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "jcsta/dynamics.hpp"
#include "jcsta/errors.hpp"

namespace jcsta {

namespace {

Matrix liouvillian(const Matrix& h, const std::vector<std::pair<double, Matrix>>& jumps, double jump_weight) {
  const Eigen::Index n = h.rows();
  const Matrix id = Matrix::Identity(n, n);
  Matrix L = -kI * (Eigen::kroneckerProduct(id, h).eval() - Eigen::kroneckerProduct(h.transpose(), id).eval());
  for (const auto& [g, a] : jumps) {
    const Matrix ada = a.adjoint() * a;
    L += jump_weight * g * (Eigen::kroneckerProduct(a.conjugate(), a).eval() - 0.5 * Eigen::kroneckerProduct(id, ada).eval() -
              0.5 * Eigen::kroneckerProduct(ada.transpose(), id).eval());
  }
  return L;
}

}  // namespace

SystemState expm_oracle(const SystemState& state, const HamiltonianSchedule& schedule, int slices_per_unit,
                        const NoiseRates& rates, OracleOrder order) {
  if (slices_per_unit < 1) throw ConfigError("slices_per_unit", "must be >= 1");
  const SpaceSpec space = state.space();
  const OperatorTable ops = build_operators(space);
  const bool open = rates.any();
  const auto jumps = jump_operators(rates, ops);
  const int dim = space.dim();

  Vector psi;
  Vector rho_vec;
  if (open || !state.is_pure()) {
    const Matrix rho = state.to_density();
    rho_vec = Eigen::Map<const Vector>(rho.data(), rho.size());
  } else {
    psi = state.vector();
  }
  const bool density = rho_vec.size() > 0;

  // generator exponential: unitary for vectors, superoperator for densities
  auto propagator = [&](const Matrix& h, double dt, double jump_weight) -> Matrix {
    if (density) return (liouvillian(h, jumps, jump_weight) * dt).exp();
    return (Matrix(-kI * dt * h)).exp();
  };

  const double c1 = 0.5 - std::sqrt(3.0) / 6.0;
  const double c2 = 0.5 + std::sqrt(3.0) / 6.0;
  const double a1 = (3.0 - 2.0 * std::sqrt(3.0)) / 12.0;
  const double a2 = (3.0 + 2.0 * std::sqrt(3.0)) / 12.0;

  for (size_t i = 0; i < schedule.segments().size(); ++i) {
    const Segment& seg = schedule.segments()[i];
    const double dur = segment_duration(seg);
    const int n = std::max(1, static_cast<int>(std::ceil(dur * slices_per_unit - 1e-9)));
    const double h = dur / n;
    for (int s = 0; s < n; ++s) {
      const double t = s * h;
      if (order == OracleOrder::midpoint) {
        const Matrix H = dense_h(segment_coefficients(seg, t + 0.5 * h), ops);
        const Matrix U = propagator(H, h, 1.0);
        if (density) rho_vec = U * rho_vec;
        else psi = U * psi;
      } else {
        const Matrix H1 = dense_h(segment_coefficients(seg, t + c1 * h), ops);
        const Matrix H2 = dense_h(segment_coefficients(seg, t + c2 * h), ops);
        const Matrix first = propagator(a2 * H1 + a1 * H2, h, 0.5);
        const Matrix second = propagator(a1 * H1 + a2 * H2, h, 0.5);
        if (density) rho_vec = second * (first * rho_vec);
        else psi = second * (first * psi);
      }
    }
  }
  if (density) {
    Matrix rho = Eigen::Map<const Matrix>(rho_vec.data(), dim, dim);
    return SystemState::density(space, 0.5 * (rho + rho.adjoint()));
  }
  return SystemState::pure(space, psi);
}

}  // namespace jcsta
