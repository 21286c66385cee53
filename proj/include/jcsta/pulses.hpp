#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "jcsta/hilbert.hpp"
#include "jcsta/types.hpp"

namespace jcsta {

// Quintic omega_q(t) and cos^4 lambda(t) drive on [0, tau].
struct BaseProtocol {
  double omega_q_start = 1.5;
  double omega_q_end = 0.5;
  double lambda_0 = 0.0;
  double lambda_m = 0.25;
  double tau = 5.0;
  double omega = 1.0;  // mode frequency; detuning is omega_q - omega

  double delta_omega_q() const { return omega_q_end - omega_q_start; }
  void validate() const;
  bool operator==(const BaseProtocol&) const = default;
};

struct DriveSample {
  double omega_q, omega_q_dot, omega_q_ddot;
  double lambda, lambda_dot, lambda_ddot;
};

DriveSample base_eval(const BaseProtocol& p, double t);

struct ThetaSample {
  double theta, theta_dot;
};

ThetaSample sta_theta(const BaseProtocol& p, int n, double t);

struct LcdFields {
  double omega_q, lambda;
};

LcdFields lcd_fields(const BaseProtocol& p, int n, double t);

struct StaSample {
  DriveSample base;
  double theta, theta_dot;
  double omega_q_tilde, lambda_tilde;
};

struct StaPulse {
  BaseProtocol base;
  int n_ref = 0;

  StaSample sample(double t) const;
};

// i theta(t) (a^dag sigma- - a sigma+) on the full space.
Matrix cd_term(const BaseProtocol& p, int n, double t, const SpaceSpec& space);

// Index sets of the excitation-number blocks of the truncated space.
std::vector<std::vector<int>> excitation_blocks(const SpaceSpec& space);

// Counterdiabatic operator from finite-difference eigenvector derivatives,
// computed block by block (blocks must be invariant subspaces of h_of_t).
Matrix berry_cd_numeric(const std::function<Matrix(double)>& h_of_t, double t, double dt,
                        const std::vector<std::vector<int>>& blocks);

// Value with first and second time derivatives.
struct Jet {
  double value, d1, d2;
};

// Generic two-level H = (Delta/2) sigma_x + (lambda/2) sigma_z.
// Returns the LCD fields so that H_LCD = (x_field/2) sigma_x + (z_field/2) sigma_z.
struct TwoLevelFields {
  double x_field, z_field;
};

TwoLevelFields two_level_lcd(const Jet& delta, const Jet& lambda);

struct GaussianPulse {
  double angle = kPi;
  double t_pi = 5.0;
  double sigma_pi = 1.0;

  double duration() const { return 2.0 * t_pi; }
  // Truncated window loses more than ~1e-4 of the angle.
  bool window_warning() const { return t_pi / sigma_pi < 4.0; }
  void validate() const;
};

double gaussian_field(const GaussianPulse& pulse, double t);

enum class FieldSource { omega_q_tilde, lambda_tilde, other };

struct FourierPulse {
  int n_modes = 0;
  double omega_F = 0.0;
  std::vector<double> c;  // k = 0..n_modes
  std::vector<double> s;  // s[0] unused (0)
  FieldSource source = FieldSource::other;
  double residual = 0.0;   // RMS residual at the fit nodes
  double condition = 1.0;  // condition number of the normal matrix
};

FourierPulse fourier_fit(std::span<const double> t, std::span<const double> x, int n_modes, double omega_F,
                         FieldSource source = FieldSource::other);
double fourier_eval(const FourierPulse& fp, double t);

// pi/tau for omega_q-tilde; 2 pi/tau for lambda-tilde, whose endpoint values coincide.
double default_fourier_frequency(FieldSource source, double tau);

FourierPulse fit_lcd_pulse(const BaseProtocol& p, int n, FieldSource source, int n_modes,
                           std::optional<double> omega_F = std::nullopt, int samples = 512);

// CSV columns t, omega_q, lambda, theta, omega_q_tilde, lambda_tilde.
void write_pulse_csv(std::ostream& os, const BaseProtocol& p, int n, int samples = 1001);

}  // namespace jcsta
