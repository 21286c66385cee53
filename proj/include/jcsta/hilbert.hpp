#pragma once

// Truncated spin (x) boson Hilbert space.
//
// Basis ordering is spin-major: index = spin * d + n with g = 0, e = 1.

#include <string>
#include <vector>

#include <json.hpp>

#include "jcsta/types.hpp"

namespace jcsta {

enum class Spin : int { g = 0, e = 1 };

inline constexpr double kDefaultLeakTolerance = 1e-6;

struct SpaceSpec {
  int fock_dim = 30;
  double omega = 1.0;

  int dim() const { return 2 * fock_dim; }
  int index(Spin s, int n) const { return static_cast<int>(s) * fock_dim + n; }
  void validate() const;
  bool operator==(const SpaceSpec&) const = default;
};

struct OperatorMatrix {
  std::string label;
  Matrix matrix;
};

// Factor operators (d x d, 2 x 2) and their embeddings in the full space.
struct OperatorTable {
  SpaceSpec space;
  Matrix a, adag, num;
  Matrix sp, sm, sx, sz;
  Matrix A, Adag, Num, Sp, Sm, Sx, Sz, Ne;

  const Matrix& at(const std::string& label) const;
  std::vector<OperatorMatrix> entries() const;
};

OperatorTable build_operators(const SpaceSpec& space);

// Kronecker embedding of spin (2x2) and boson (dxd) factors.
Matrix embed(const Matrix& spin_op, const Matrix& boson_op);

class SystemState {
 public:
  enum class Kind { pure, density };

  static SystemState pure(const SpaceSpec& space, Vector psi);
  static SystemState density(const SpaceSpec& space, Matrix rho);

  Kind kind() const { return kind_; }
  bool is_pure() const { return kind_ == Kind::pure; }
  const SpaceSpec& space() const { return space_; }
  const Vector& vector() const;
  const Matrix& matrix() const;
  Matrix to_density() const;

  double trace() const;
  double top_level_population() const;
  bool truncation_safe(double tol = kDefaultLeakTolerance) const {
    return top_level_population() <= tol;
  }
  // Throws NumericalError when norm/trace/Hermiticity/positivity fail.
  void check_invariants() const;

 private:
  SystemState(const SpaceSpec& space, Kind kind) : space_(space), kind_(kind) {}
  SpaceSpec space_;
  Kind kind_;
  Vector psi_;
  Matrix rho_;
};

Vector basis_state(const SpaceSpec& space, Spin s, int n);
Vector product_state(const SpaceSpec& space, Spin s, const Vector& boson);

Vector fock_amplitudes(int n, int d);
Vector coherent_amplitudes(cplx alpha, int d);
SystemState coherent_state(cplx alpha, const SpaceSpec& space, Spin s = Spin::e);

// Gibbs populations of omega a^dag a at inverse temperature beta (beta = inf gives vacuum).
Eigen::VectorXd thermal_populations(double beta, const SpaceSpec& space);
Matrix thermal_boson(double beta, const SpaceSpec& space);
SystemState thermal_state(double beta, const SpaceSpec& space, Spin s = Spin::e);
double thermal_occupation(double beta, double omega);

// exp(beta a^dag - beta^* a) of the truncated generator.
Matrix displacement(cplx beta, int d);
// Exact Fock matrix elements <m|D(gamma)|n> for m, n < d.
Matrix displacement_elements(cplx gamma, int d);

struct Measurement {
  SystemState state;
  double probability;
};
Measurement project_spin(const SystemState& state, Spin r);

Eigen::Matrix2cd reduce_spin(const SystemState& state);
Matrix reduce_boson(const SystemState& state);
Matrix reduce_boson(const Vector& psi, int d);

nlohmann::json state_to_json(const SystemState& state);
SystemState state_from_json(const nlohmann::json& j, double omega = 1.0);

}  // namespace jcsta
