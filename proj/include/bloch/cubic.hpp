#pragma once

#include <complex>

#include "bloch/types.hpp"

namespace bloch {

using Complex = std::complex<double>;

/// Default relative tolerance for detecting degenerate root structure.
inline constexpr double kDegeneracyTol = 1e-9;

/// det(s*Id + Gamma) = c0 + c1 s + c2 s^2 + s^3.
struct CharPolyCoeffs {
  double c0 = 0.0;  // [1/s^3]
  double c1 = 0.0;  // [1/s^2]
  double c2 = 0.0;  // [1/s]
};

/// Depressed cubic q(z) = z^3 + a z + b for the trace-free generator.
struct CanonicalCoeffs {
  double a = 0.0;  // [1/s^2]
  double b = 0.0;  // [1/s^3]
  // Compensated low-order part of a; carried so that large oscillation
  // phases keep sub-ulp accuracy through sqrt(a)*t.
  double a_lo = 0.0;

  double alpha() const { return std::abs(a) / 3.0; }
  double beta() const { return std::abs(b) / 2.0; }
  /// beta / alpha^{3/2}; +inf when a == 0 and b != 0, 0 when both vanish.
  double gamma_param() const;
};

enum class RootClass {
  Underdamped,     // one real root, complex conjugate pair
  Overdamped,      // three distinct real roots
  CriticalDouble,  // two-fold degenerate real root
  CriticalTriple,  // a = b = 0, triple root at zero
};

const char* root_class_name(RootClass c);

struct CubicSolution {
  double z1 = 0.0;        // guaranteed real root (non-degenerate one for CriticalDouble)
  double varpi_sq = 0.0;  // 3[(z1/2)^2 + a/3]
  double varpi = 0.0;     // |varpi| (equals mu when varpi_sq < 0)
  double varpi_lo = 0.0;  // compensated low-order part of varpi
  RootClass root_class = RootClass::CriticalTriple;
  Complex z_plus, z_minus;  // -z1/2 +- i*varpi
  double r_bar = 0.0;
  double a = 0.0;
  double b = 0.0;
  double gamma = 0.0;  // beta / alpha^{3/2}

  /// Shifted roots s_i = z_i - rBar, the eigenvalues of -Gamma.
  Complex s1() const { return Complex(z1 - r_bar, 0.0); }
  Complex s2() const { return z_plus - r_bar; }
  Complex s3() const { return z_minus - r_bar; }
};

CharPolyCoeffs char_poly_coeffs(const GammaMatrix& g);
CanonicalCoeffs canonical_coeffs(const PartitionedSystem& p);
CanonicalCoeffs canonical_coeffs(const CharPolyCoeffs& c);

RootClass classify(const CanonicalCoeffs& c, double tol_rel = kDegeneracyTol);
CubicSolution solve_roots(const CanonicalCoeffs& c, double r_bar,
                          double tol_rel = kDegeneracyTol);

}  // namespace bloch
