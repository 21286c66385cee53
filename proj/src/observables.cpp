#include "jcsta/observables.hpp"

#include <cmath>

#include "jcsta/errors.hpp"

namespace jcsta {

double fidelity(const Vector& psi, const Vector& target) {
  if (psi.size() != target.size()) throw DimensionError("fidelity: dimension mismatch");
  return std::norm(target.dot(psi));
}

double fidelity(const Matrix& rho, const Vector& target) {
  if (rho.rows() != target.size() || rho.cols() != target.size()) throw DimensionError("fidelity: dimension mismatch");
  return target.dot(rho * target).real();
}

double fidelity(const SystemState& state, const Vector& target) {
  return state.is_pure() ? fidelity(state.vector(), target) : fidelity(state.matrix(), target);
}

double purity(const Matrix& rho) { return (rho * rho).trace().real(); }

double purity(const SystemState& state) {
  if (state.is_pure()) return std::pow(state.vector().squaredNorm(), 2);
  return purity(state.matrix());
}

double mandel_q(const Matrix& rho) {
  double tr = 0, n1 = 0, n2 = 0;
  for (Eigen::Index n = 0; n < rho.rows(); ++n) {
    const double p = rho(n, n).real();
    tr += p;
    n1 += n * p;
    n2 += double(n) * n * p;
  }
  n1 /= tr;
  n2 /= tr;
  if (n1 <= 1e-12) throw NumericalError("mandel_q undefined for vanishing <n>");
  return (n2 - n1 * n1) / n1 - 1.0;
}

double mandel_q(const SystemState& state) { return mandel_q(reduce_boson(state)); }

Vector photon_added_reference(const Vector& psi, int k) {
  if (k < 0) throw RangeError("photon additions must be >= 0");
  const Eigen::Index d = psi.size();
  Vector out = psi;
  for (int r = 0; r < k; ++r) {
    Vector next = Vector::Zero(d);
    for (Eigen::Index n = 0; n + 1 < d; ++n) next(n + 1) = std::sqrt(double(n + 1)) * out(n);
    out = next;
  }
  const double nrm = out.norm();
  if (nrm < 1e-14) throw NumericalError("photon-added state has zero norm");
  return out / nrm;
}

Matrix photon_added_reference(const Matrix& rho, int k) {
  if (k < 0) throw RangeError("photon additions must be >= 0");
  const Eigen::Index d = rho.rows();
  Matrix ad = Matrix::Zero(d, d);
  for (Eigen::Index n = 0; n + 1 < d; ++n) ad(n + 1, n) = std::sqrt(double(n + 1));
  Matrix out = rho;
  for (int r = 0; r < k; ++r) out = ad * out * ad.adjoint();
  const double tr = out.trace().real();
  if (tr < 1e-14) throw NumericalError("photon-added state has zero norm");
  return out / tr;
}

int effective_dim(const Matrix& rho, double tail) {
  const int d = static_cast<int>(rho.rows());
  double acc = 0.0;
  for (int n = d - 1; n >= 0; --n) {
    acc += std::abs(rho(n, n).real());
    if (acc > tail) return n + 1;
  }
  return 1;
}

}  // namespace jcsta
