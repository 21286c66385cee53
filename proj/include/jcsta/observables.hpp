#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "jcsta/hilbert.hpp"

namespace jcsta {

double fidelity(const Vector& psi, const Vector& target);
double fidelity(const Matrix& rho, const Vector& target);
double fidelity(const SystemState& state, const Vector& target);

double purity(const Matrix& rho);
double purity(const SystemState& state);

// Boson density (d x d); throws NumericalError for vanishing <n>.
double mandel_q(const Matrix& rho_boson);
double mandel_q(const SystemState& state);

struct WignerSpec {
  double extent = 5.0;  // grid covers [-extent, extent] on both axes
  int resolution = 201;
  void validate() const;
  bool operator==(const WignerSpec&) const = default;
};

// Cell-centred grid: x_i = -extent + (i + 1/2) h with h = 2 extent / resolution.
struct WignerGrid {
  double re_range = 5.0;
  double im_range = 5.0;
  int resolution = 0;
  RealMatrix values;               // values(i, j): Re beta = x_i, Im beta = y_j
  double max_imag_residue = 0.0;

  double spacing() const { return 2.0 * re_range / resolution; }
  double coordinate(int i) const { return -re_range + (i + 0.5) * spacing(); }
  double edge_max() const;
  double integral() const;  // (1/pi) sum W h^2, equals Tr rho
};

// W(beta) = 2 Tr[rho D(beta) P D(beta)^dag]; rows computed in parallel.
WignerGrid wigner(const Matrix& rho_boson, const WignerSpec& spec);
WignerGrid wigner(const Vector& psi_boson, const WignerSpec& spec);
// Serial reference from truncated displacement matrices on an enlarged space.
WignerGrid wigner_reference(const Matrix& rho_boson, const WignerSpec& spec, int pad = 60);
double wigner_point(const Matrix& rho_boson, cplx beta);

// (1/2 pi) sum (|W| - W) h^2 over the grid.
double negativity(const WignerGrid& grid);

Vector photon_added_reference(const Vector& psi_boson, int k);
Matrix photon_added_reference(const Matrix& rho_boson, int k);

// Smallest leading dimension that keeps all but `tail` of the population.
int effective_dim(const Matrix& rho_boson, double tail = 1e-14);

void write_wigner_csv(std::ostream& os, const WignerGrid& grid);
nlohmann::json wigner_sidecar(const WignerGrid& grid);
WignerGrid read_wigner_csv(std::istream& is, const nlohmann::json& sidecar);

}  // namespace jcsta
