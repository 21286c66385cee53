#include "jcsta/hilbert.hpp"

#include <cmath>
#include <limits>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "jcsta/errors.hpp"

namespace jcsta {

void SpaceSpec::validate() const {
  if (fock_dim < 2) throw ConfigError("space.fock_dim", "must be >= 2");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ConfigError("space.omega", "must be > 0");
}

Matrix embed(const Matrix& spin_op, const Matrix& boson_op) {
  return Eigen::kroneckerProduct(spin_op, boson_op).eval();
}

OperatorTable build_operators(const SpaceSpec& space) {
  space.validate();
  const int d = space.fock_dim;
  OperatorTable t;
  t.space = space;
  t.a = Matrix::Zero(d, d);
  for (int n = 1; n < d; ++n) t.a(n - 1, n) = std::sqrt(static_cast<double>(n));
  t.adag = t.a.adjoint();
  t.num = t.adag * t.a;

  // spin basis (g, e): sigma+ = |e><g|
  t.sp = Matrix::Zero(2, 2);
  t.sp(1, 0) = 1.0;
  t.sm = t.sp.adjoint();
  t.sx = t.sp + t.sm;
  t.sz = Matrix::Zero(2, 2);
  t.sz(0, 0) = -1.0;
  t.sz(1, 1) = 1.0;

  const Matrix i2 = Matrix::Identity(2, 2);
  const Matrix id = Matrix::Identity(d, d);
  t.A = embed(i2, t.a);
  t.Adag = embed(i2, t.adag);
  t.Num = embed(i2, t.num);
  t.Sp = embed(t.sp, id);
  t.Sm = embed(t.sm, id);
  t.Sx = embed(t.sx, id);
  t.Sz = embed(t.sz, id);
  Matrix pe = Matrix::Zero(2, 2);
  pe(1, 1) = 1.0;
  t.Ne = embed(pe, id) + t.Num;
  return t;
}

const Matrix& OperatorTable::at(const std::string& label) const {
  if (label == "a") return a;
  if (label == "adag") return adag;
  if (label == "n") return num;
  if (label == "sp") return sp;
  if (label == "sm") return sm;
  if (label == "sx") return sx;
  if (label == "sz") return sz;
  if (label == "A") return A;
  if (label == "Adag") return Adag;
  if (label == "N") return Num;
  if (label == "Sp") return Sp;
  if (label == "Sm") return Sm;
  if (label == "Sx") return Sx;
  if (label == "Sz") return Sz;
  if (label == "Ne") return Ne;
  throw std::out_of_range("unknown operator label " + label);
}

std::vector<OperatorMatrix> OperatorTable::entries() const {
  std::vector<OperatorMatrix> out;
  for (const char* l : {"a", "adag", "n", "sp", "sm", "sx", "sz", "A", "Adag", "N", "Sp", "Sm", "Sx", "Sz", "Ne"})
    out.push_back({l, at(l)});
  return out;
}

// ---------------------------------------------------------------- states

SystemState SystemState::pure(const SpaceSpec& space, Vector psi) {
  if (psi.size() != space.dim())
    throw DimensionError("pure state length " + std::to_string(psi.size()) + " != " + std::to_string(space.dim()));
  SystemState s(space, Kind::pure);
  s.psi_ = std::move(psi);
  return s;
}

SystemState SystemState::density(const SpaceSpec& space, Matrix rho) {
  if (rho.rows() != space.dim() || rho.cols() != space.dim())
    throw DimensionError("density shape does not match space dimension " + std::to_string(space.dim()));
  SystemState s(space, Kind::density);
  s.rho_ = std::move(rho);
  return s;
}

const Vector& SystemState::vector() const {
  if (kind_ != Kind::pure) throw std::logic_error("state is not pure");
  return psi_;
}

const Matrix& SystemState::matrix() const {
  if (kind_ != Kind::density) throw std::logic_error("state is not a density");
  return rho_;
}

Matrix SystemState::to_density() const {
  if (kind_ == Kind::density) return rho_;
  return psi_ * psi_.adjoint();
}

double SystemState::trace() const {
  if (kind_ == Kind::pure) return psi_.squaredNorm();
  return rho_.trace().real();
}

double SystemState::top_level_population() const {
  const int d = space_.fock_dim;
  const int ig = space_.index(Spin::g, d - 1);
  const int ie = space_.index(Spin::e, d - 1);
  if (kind_ == Kind::pure) return std::norm(psi_(ig)) + std::norm(psi_(ie));
  return rho_(ig, ig).real() + rho_(ie, ie).real();
}

void SystemState::check_invariants() const {
  if (kind_ == Kind::pure) {
    const double n = psi_.norm();
    if (std::abs(n - 1.0) > 1e-10) throw NumericalError("pure state norm " + std::to_string(n) + " != 1");
    return;
  }
  const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-12) throw NumericalError("density not Hermitian (" + std::to_string(herm) + ")");
  if (std::abs(trace() - 1.0) > 1e-10) throw NumericalError("density trace " + std::to_string(trace()) + " != 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-8) throw NumericalError("density has negative eigenvalue");
}

Vector basis_state(const SpaceSpec& space, Spin s, int n) {
  if (n < 0 || n >= space.fock_dim) throw DimensionError("Fock index " + std::to_string(n) + " outside truncation");
  Vector v = Vector::Zero(space.dim());
  v(space.index(s, n)) = 1.0;
  return v;
}

Vector product_state(const SpaceSpec& space, Spin s, const Vector& boson) {
  if (boson.size() != space.fock_dim) throw DimensionError("boson factor length mismatch");
  Vector v = Vector::Zero(space.dim());
  v.segment(space.index(s, 0), space.fock_dim) = boson;
  return v;
}

Vector fock_amplitudes(int n, int d) {
  if (n < 0 || n >= d) throw DimensionError("Fock index outside truncation");
  Vector v = Vector::Zero(d);
  v(n) = 1.0;
  return v;
}

Vector coherent_amplitudes(cplx alpha, int d) {
  Vector v(d);
  cplx c = std::exp(-0.5 * std::norm(alpha));
  v(0) = c;
  for (int n = 1; n < d; ++n) {
    c *= alpha / std::sqrt(static_cast<double>(n));
    v(n) = c;
  }
  return v;
}

SystemState coherent_state(cplx alpha, const SpaceSpec& space, Spin s) {
  Vector b = coherent_amplitudes(alpha, space.fock_dim);
  b.normalize();
  return SystemState::pure(space, product_state(space, s, b));
}

Eigen::VectorXd thermal_populations(double beta, const SpaceSpec& space) {
  if (!(beta > 0.0)) throw ConfigError("beta_th", "must be > 0");
  const int d = space.fock_dim;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(d);
  if (std::isinf(beta)) {
    p(0) = 1.0;
    return p;
  }
  const double x = std::exp(-beta * space.omega);
  double w = 1.0;
  for (int n = 0; n < d; ++n) {
    p(n) = w;
    w *= x;
  }
  return p / p.sum();
}

Matrix thermal_boson(double beta, const SpaceSpec& space) {
  return thermal_populations(beta, space).cast<cplx>().asDiagonal();
}

SystemState thermal_state(double beta, const SpaceSpec& space, Spin s) {
  Matrix spin = Matrix::Zero(2, 2);
  spin(static_cast<int>(s), static_cast<int>(s)) = 1.0;
  return SystemState::density(space, embed(spin, thermal_boson(beta, space)));
}

double thermal_occupation(double beta, double omega) {
  if (std::isinf(beta)) return 0.0;
  return 1.0 / std::expm1(beta * omega);
}

Matrix displacement(cplx beta, int d) {
  Matrix a = Matrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  Matrix gen = beta * a.adjoint() - std::conj(beta) * a;
  return gen.exp();
}

Matrix displacement_elements(cplx gamma, int d) {
  Matrix D(d, d);
  D.col(0) = coherent_amplitudes(gamma, d);
  const cplx gc = std::conj(gamma);
  for (int n = 0; n + 1 < d; ++n) {
    const double inv = 1.0 / std::sqrt(static_cast<double>(n + 1));
    D(0, n + 1) = -gc * D(0, n) * inv;
    for (int m = 1; m < d; ++m)
      D(m, n + 1) = (std::sqrt(static_cast<double>(m)) * D(m - 1, n) - gc * D(m, n)) * inv;
  }
  return D;
}

Measurement project_spin(const SystemState& state, Spin r) {
  const SpaceSpec& sp = state.space();
  const int d = sp.fock_dim;
  const int off = sp.index(r, 0);
  if (state.is_pure()) {
    Vector out = Vector::Zero(sp.dim());
    out.segment(off, d) = state.vector().segment(off, d);
    const double p = out.squaredNorm();
    if (p < 1e-12) throw MeasurementError("spin outcome has zero probability");
    out /= std::sqrt(p);
    return {SystemState::pure(sp, std::move(out)), p};
  }
  Matrix out = Matrix::Zero(sp.dim(), sp.dim());
  out.block(off, off, d, d) = state.matrix().block(off, off, d, d);
  const double p = out.trace().real();
  if (p < 1e-12) throw MeasurementError("spin outcome has zero probability");
  out /= p;
  return {SystemState::density(sp, std::move(out)), p};
}

Eigen::Matrix2cd reduce_spin(const SystemState& state) {
  const int d = state.space().fock_dim;
  Eigen::Matrix2cd r;
  if (state.is_pure()) {
    const Vector& v = state.vector();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r(i, j) = v.segment(j * d, d).dot(v.segment(i * d, d));
    return r;
  }
  const Matrix& m = state.matrix();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = m.block(i * d, j * d, d, d).trace();
  return r;
}

Matrix reduce_boson(const Vector& psi, int d) {
  const auto g = psi.segment(0, d);
  const auto e = psi.segment(d, d);
  return g * g.adjoint() + e * e.adjoint();
}

Matrix reduce_boson(const SystemState& state) {
  const int d = state.space().fock_dim;
  if (state.is_pure()) return reduce_boson(state.vector(), d);
  const Matrix& m = state.matrix();
  return m.block(0, 0, d, d) + m.block(d, d, d, d);
}

nlohmann::json state_to_json(const SystemState& state) {
  nlohmann::json j;
  j["dim"] = state.space().dim();
  j["kind"] = state.is_pure() ? "pure" : "density";
  std::vector<double> re, im;
  if (state.is_pure()) {
    for (Eigen::Index i = 0; i < state.vector().size(); ++i) {
      re.push_back(state.vector()(i).real());
      im.push_back(state.vector()(i).imag());
    }
  } else {
    const Matrix& m = state.matrix();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        re.push_back(m(r, c).real());
        im.push_back(m(r, c).imag());
      }
  }
  j["re"] = re;
  j["im"] = im;
  return j;
}

SystemState state_from_json(const nlohmann::json& j, double omega) {
  try {
    const int dim = j.at("dim").get<int>();
    if (dim < 4 || dim % 2 != 0) throw ConfigError("dim", "must be even and >= 4");
    SpaceSpec sp{dim / 2, omega};
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    const std::string kind = j.at("kind").get<std::string>();
    if (re.size() != im.size()) throw ConfigError("im", "length differs from re");
    if (kind == "pure") {
      if (re.size() != static_cast<size_t>(dim)) throw ConfigError("re", "length != dim");
      Vector v(dim);
      for (int i = 0; i < dim; ++i) v(i) = cplx(re[i], im[i]);
      return SystemState::pure(sp, std::move(v));
    }
    if (kind == "density") {
      if (re.size() != static_cast<size_t>(dim) * dim) throw ConfigError("re", "length != dim^2");
      Matrix m(dim, dim);
      for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) m(r, c) = cplx(re[r * dim + c], im[r * dim + c]);
      return SystemState::density(sp, std::move(m));
    }
    throw ConfigError("kind", "must be pure or density");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("state", e.what());
  }
}

}  // namespace jcsta
