#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "jcsta/errors.hpp"
#include "jcsta/observables.hpp"

namespace jcsta {

void WignerSpec::validate() const {
  if (!(extent > 0.0)) throw ConfigError("wigner.extent", "must be > 0");
  if (resolution < 3) throw ConfigError("wigner.resolution", "must be >= 3");
}

double WignerGrid::edge_max() const {
  const int r = resolution;
  double m = 0.0;
  for (int k = 0; k < r; ++k)
    m = std::max({m, std::abs(values(0, k)), std::abs(values(r - 1, k)), std::abs(values(k, 0)),
                  std::abs(values(k, r - 1))});
  return m;
}

double WignerGrid::integral() const {
  const double h = spacing();
  return values.sum() * h * h / kPi;
}

double wigner_point(const Matrix& rho, cplx beta) {
  const int d = static_cast<int>(rho.rows());
  const Matrix D = displacement_elements(2.0 * beta, d);
  cplx acc = 0.0;
  for (int n = 0; n < d; ++n) {
    const double parity = n % 2 == 0 ? 1.0 : -1.0;
    for (int m = 0; m < d; ++m) acc += parity * rho(n, m) * D(m, n);
  }
  return 2.0 * acc.real();
}

WignerGrid wigner(const Matrix& rho_full, const WignerSpec& spec) {
  spec.validate();
  const int d = effective_dim(rho_full);
  const Matrix rho = rho_full.topLeftCorner(d, d);
  WignerGrid g;
  g.re_range = g.im_range = spec.extent;
  g.resolution = spec.resolution;
  g.values.resize(spec.resolution, spec.resolution);
  const int r = spec.resolution;

  // (-1)^n rho(n, m) so that W = 2 sum_{n,m} prho(n, m) D(m, n)
  Matrix prho = rho;
  for (int n = 1; n < d; n += 2) prho.row(n) *= -1.0;

  double residue = 0.0;
#pragma omp parallel for schedule(dynamic) reduction(max : residue)
  for (int i = 0; i < r; ++i) {
    const double x = g.coordinate(i);
    for (int j = 0; j < r; ++j) {
      const double y = g.coordinate(j);
      const Matrix D = displacement_elements(cplx(2.0 * x, 2.0 * y), d);
      const cplx w = 2.0 * (prho.transpose().cwiseProduct(D)).sum();
      g.values(i, j) = w.real();
      residue = std::max(residue, std::abs(w.imag()));
    }
  }
  g.max_imag_residue = residue;
  return g;
}

WignerGrid wigner(const Vector& psi, const WignerSpec& spec) { return wigner(Matrix(psi * psi.adjoint()), spec); }

WignerGrid wigner_reference(const Matrix& rho, const WignerSpec& spec, int pad) {
  spec.validate();
  const int d = static_cast<int>(rho.rows());
  const int big = d + pad;
  Matrix rho_big = Matrix::Zero(big, big);
  rho_big.topLeftCorner(d, d) = rho;
  Eigen::VectorXd parity(big);
  for (int n = 0; n < big; ++n) parity(n) = n % 2 == 0 ? 1.0 : -1.0;

  WignerGrid g;
  g.re_range = g.im_range = spec.extent;
  g.resolution = spec.resolution;
  g.values.resize(spec.resolution, spec.resolution);
  for (int i = 0; i < spec.resolution; ++i)
    for (int j = 0; j < spec.resolution; ++j) {
      const Matrix D = displacement(cplx(g.coordinate(i), g.coordinate(j)), big);
      const Matrix op = D * parity.cast<cplx>().asDiagonal() * D.adjoint();
      const cplx w = 2.0 * (rho_big * op).trace();
      g.values(i, j) = w.real();
      g.max_imag_residue = std::max(g.max_imag_residue, std::abs(w.imag()));
    }
  return g;
}

double negativity(const WignerGrid& grid) {
  const double h = grid.spacing();
  const double neg = (grid.values.cwiseAbs() - grid.values).sum();
  return neg * h * h / (2.0 * kPi);
}

void write_wigner_csv(std::ostream& os, const WignerGrid& grid) {
  char buf[40];
  for (int i = 0; i < grid.resolution; ++i) {
    for (int j = 0; j < grid.resolution; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", grid.values(i, j));
      if (j) os << ',';
      os << buf;
    }
    os << '\n';
  }
}

nlohmann::json wigner_sidecar(const WignerGrid& grid) {
  return {{"re_range", {-grid.re_range, grid.re_range}},
          {"im_range", {-grid.im_range, grid.im_range}},
          {"resolution", grid.resolution},
          {"layout", "rows index Re(beta), columns index Im(beta), cell centres"}};
}

WignerGrid read_wigner_csv(std::istream& is, const nlohmann::json& sidecar) {
  WignerGrid g;
  try {
    g.resolution = sidecar.at("resolution").get<int>();
    g.re_range = sidecar.at("re_range").at(1).get<double>();
    g.im_range = sidecar.at("im_range").at(1).get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("wigner sidecar: ") + e.what());
  }
  g.values.resize(g.resolution, g.resolution);
  std::string line;
  for (int i = 0; i < g.resolution; ++i) {
    if (!std::getline(is, line)) throw IoError("wigner csv: missing rows");
    std::stringstream ss(line);
    std::string cell;
    for (int j = 0; j < g.resolution; ++j) {
      if (!std::getline(ss, cell, ',')) throw IoError("wigner csv: short row");
      g.values(i, j) = std::stod(cell);
    }
  }
  return g;
}

}  // namespace jcsta
