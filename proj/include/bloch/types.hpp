#pragma once

#include <Eigen/Dense>

#include "bloch/errors.hpp"

namespace bloch {

using Matrix3 = Eigen::Matrix3d;
using Vector3 = Eigen::Vector3d;

/// Effective field in the rotating frame, components in rad/s.
struct FieldVector {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double omega3 = 0.0;

  double omega12_sq() const { return omega1 * omega1 + omega2 * omega2; }
  double omega_e_sq() const { return omega12_sq() + omega3 * omega3; }
  double omega12() const { return std::sqrt(omega12_sq()); }
  double omega_e() const { return std::sqrt(omega_e_sq()); }
  /// Phase of the transverse field relative to the x-axis.
  double phase() const { return std::atan2(omega2, omega1); }

  Vector3 vec() const { return Vector3(omega1, omega2, omega3); }
};

/// Per-component relaxation rates in 1/s.
struct RelaxationRates {
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;

  double r_bar() const { return (r1 + r2 + r3) / 3.0; }
  /// Trace-free parts r_i - rBar.
  Vector3 partitioned() const {
    const double rb = r_bar();
    return Vector3(r1 - rb, r2 - rb, r3 - rb);
  }
  /// (r2 - r3)/3; the natural frequency scale when r1 == r2.
  double r_delta() const { return (r2 - r3) / 3.0; }
  bool transverse_equal(double rel_tol = 1e-12) const {
    return std::abs(r1 - r2) <= rel_tol * std::max({std::abs(r1), std::abs(r2), 1.0});
  }

  Vector3 vec() const { return Vector3(r1, r2, r3); }
};

/// The Bloch generator: diagonal rates, off-diagonal eps_ijk * omega_k.
struct GammaMatrix {
  Matrix3 m;
  FieldVector field;
  RelaxationRates rates;
};

/// Gamma split as rBar*Id + gammaP with trace-free gammaP.
struct PartitionedSystem {
  double r_bar = 0.0;
  Matrix3 gamma_p;
};

/// Coupled-oscillator constants extracted from Gamma^2.
struct CouplingSet {
  Matrix3 kappa;     // symmetric, omega_i * omega_j
  Matrix3 sigma;     // antisymmetric, eps_ijk (R_i + R_j) omega_k
  Vector3 k_diag;    // self couplings
  Matrix3 gamma_sq;  // Gamma^2
};

GammaMatrix build_gamma(const FieldVector& field, const RelaxationRates& rates);
PartitionedSystem partition(const GammaMatrix& g);
CouplingSet gamma_squared_couplings(const GammaMatrix& g);

}  // namespace bloch
