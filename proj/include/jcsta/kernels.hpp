#pragma once

// Structured H and Lindblad kernels on the spin-major basis.
//
// H = (omega_q/2) sz + mode*omega a^dag a + conj(k) a s+ + k a^dag s- + drive_x sx,
// with k = coupling + i*cd.  The dense routines are the serial references.

#include <utility>
#include <vector>

#include "jcsta/hilbert.hpp"

namespace jcsta {

struct JcCoefficients {
  double omega_q = 0.0;
  double mode = 1.0;
  double coupling = 0.0;
  double cd = 0.0;
  double drive_x = 0.0;
};

struct NoiseRates {
  double gamma_sm = 0.0;
  double gamma_sz = 0.0;
  double gamma_a = 0.0;
  double gamma_ad = 0.0;

  bool any() const { return gamma_sm > 0.0 || gamma_sz > 0.0 || gamma_a > 0.0 || gamma_ad > 0.0; }
  void validate() const;
  bool operator==(const NoiseRates&) const = default;
};

Matrix dense_h(const JcCoefficients& c, const OperatorTable& ops);

// out = H psi
void apply_h(const JcCoefficients& c, const SpaceSpec& space, const Vector& in, Vector& out);

// out = L[rho]; parallel over columns of rho.
void lindblad_rhs(const JcCoefficients& c, const NoiseRates& rates, const SpaceSpec& space, const Matrix& rho,
                  Matrix& out);

std::vector<std::pair<double, Matrix>> jump_operators(const NoiseRates& rates, const OperatorTable& ops);

Matrix lindblad_rhs_reference(const Matrix& h, const std::vector<std::pair<double, Matrix>>& jumps,
                              const Matrix& rho);

}  // namespace jcsta
