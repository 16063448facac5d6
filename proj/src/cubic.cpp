#include "bloch/cubic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dd.hpp"

namespace bloch {

namespace {

constexpr double kMachineFloor = 1e-150;

double sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

const char* root_class_name(RootClass c) {
  switch (c) {
    case RootClass::Underdamped: return "underdamped";
    case RootClass::Overdamped: return "overdamped";
    case RootClass::CriticalDouble: return "critical-double";
    case RootClass::CriticalTriple: return "critical-triple";
  }
  return "?";
}

double CanonicalCoeffs::gamma_param() const {
  const double al = alpha();
  const double be = beta();
  if (be == 0.0) return 0.0;
  if (al == 0.0) return std::numeric_limits<double>::infinity();
  // Direct form unless alpha^{3/2} or the quotient can over/underflow.
  if (al > 1e-100 && al < 1e100 && be < 1e150) {
    return be / (al * std::sqrt(al));
  }
  const double lg = std::log(be) - 1.5 * std::log(al);
  if (lg > 709.0) return std::numeric_limits<double>::infinity();
  if (lg < -745.0) return 0.0;
  return std::exp(lg);
}

CharPolyCoeffs char_poly_coeffs(const GammaMatrix& g) {
  const auto& w = g.field;
  const auto& r = g.rates;
  CharPolyCoeffs c;
  c.c2 = r.r1 + r.r2 + r.r3;
  c.c1 = w.omega_e_sq() + r.r1 * r.r2 + r.r1 * r.r3 + r.r2 * r.r3;
  c.c0 = r.r1 * r.r2 * r.r3 + r.r1 * w.omega1 * w.omega1 +
         r.r2 * w.omega2 * w.omega2 + r.r3 * w.omega3 * w.omega3;
  return c;
}

CanonicalCoeffs canonical_coeffs(const PartitionedSystem& p) {
  const Matrix3& gp = p.gamma_p;
  const double r1p = gp(0, 0), r2p = gp(1, 1), r3p = gp(2, 2);
  const double w1 = gp(1, 2), w2 = gp(2, 0), w3 = gp(0, 1);
  CanonicalCoeffs c;
  detail::DD a{0.0, 0.0};
  a = detail::dd_add_prod(a, w1, w1);
  a = detail::dd_add_prod(a, w2, w2);
  a = detail::dd_add_prod(a, w3, w3);
  a = detail::dd_add_prod(a, r1p, r2p);
  a = detail::dd_add_prod(a, r1p, r3p);
  a = detail::dd_add_prod(a, r2p, r3p);
  c.a = a.hi;
  c.a_lo = a.lo;
  c.b = r1p * r2p * r3p + r1p * w1 * w1 + r2p * w2 * w2 + r3p * w3 * w3;
  return c;
}

CanonicalCoeffs canonical_coeffs(const CharPolyCoeffs& c) {
  const double h = c.c2 / 3.0;
  CanonicalCoeffs out;
  out.a = c.c1 - c.c2 * h;
  out.b = 2.0 * h * h * h - c.c1 * h + c.c0;
  return out;
}

RootClass classify(const CanonicalCoeffs& c, double tol_rel) {
  const double scale = std::max({std::sqrt(std::abs(c.a)), std::cbrt(std::abs(c.b)),
                                 kMachineFloor});
  if (std::abs(c.a) <= tol_rel * scale * scale &&
      std::abs(c.b) <= tol_rel * scale * scale * scale) {
    return RootClass::CriticalTriple;
  }
  if (c.a >= 0.0) return RootClass::Underdamped;
  const double gamma = c.gamma_param();
  if (std::abs(gamma - 1.0) <= tol_rel) return RootClass::CriticalDouble;
  return gamma > 1.0 ? RootClass::Underdamped : RootClass::Overdamped;
}

CubicSolution solve_roots(const CanonicalCoeffs& c, double r_bar, double tol_rel) {
  CubicSolution sol;
  sol.a = c.a;
  sol.b = c.b;
  sol.r_bar = r_bar;
  sol.gamma = c.gamma_param();
  sol.root_class = classify(c, tol_rel);

  const double a = c.a;
  const double alpha = c.alpha();
  const double sqrt_alpha = std::sqrt(alpha);
  const double sgn_b = sign_of(c.b);
  const double gamma = sol.gamma;

  // Guaranteed real root z1 plus the branch-matched discriminant. The
  // discriminant is assembled per branch so that varpi vanishes smoothly
  // instead of by cancellation in 3(z1/2)^2 + a.
  if (sol.root_class == RootClass::CriticalTriple) {
    sol.z1 = -sgn_b * std::cbrt(std::abs(c.b));
    sol.varpi_sq = 0.75 * sol.z1 * sol.z1 + a;
    sol.varpi = std::sqrt(std::abs(sol.varpi_sq));
  } else if (a == 0.0 || !std::isfinite(gamma) || gamma > 1e100) {
    // Explicit cube-root branch; also the safe limit of the hyperbolic
    // forms when gamma overflows.
    sol.z1 = -sgn_b * std::cbrt(std::abs(c.b));
    sol.varpi = 0.5 * std::sqrt(3.0) * std::abs(sol.z1);
    sol.varpi_sq = sol.varpi * sol.varpi;
  } else if (a > 0.0) {
    const double phi = std::asinh(gamma) / 3.0;
    sol.z1 = -2.0 * sqrt_alpha * sgn_b * std::sinh(phi);
    // varpi = sqrt(a) * cosh(phi); carry the low-order part so large
    // phases varpi*t stay accurate downstream.
    const detail::DD root_a = detail::dd_sqrt({a, c.a_lo});
    detail::DD varpi;
    if (gamma < 1e-3) {
      const double g2 = gamma * gamma;
      const double corr = g2 / 18.0 - (35.0 / 1944.0) * g2 * g2;
      varpi = detail::dd_add(root_a, detail::dd_mul_d(root_a, corr));
    } else {
      varpi = detail::dd_mul_d(root_a, std::cosh(phi));
    }
    sol.varpi = varpi.hi;
    sol.varpi_lo = varpi.lo;
    sol.varpi_sq = sol.varpi * sol.varpi;
  } else if (sol.root_class == RootClass::CriticalDouble) {
    // Non-degenerate root of the (near-)degenerate cubic; exact at gamma=1,
    // continuous with both adjacent branches.
    const double phi = (gamma >= 1.0) ? std::acosh(gamma) / 3.0
                                      : std::acos(std::min(gamma, 1.0)) / 3.0;
    const double x1 = (gamma >= 1.0) ? std::cosh(phi) : std::cos(phi);
    sol.z1 = -2.0 * sqrt_alpha * sgn_b * x1;
    sol.varpi = 0.0;
    sol.varpi_sq = 0.0;
  } else if (gamma > 1.0) {
    const double phi = std::acosh(gamma) / 3.0;
    sol.z1 = -2.0 * sqrt_alpha * sgn_b * std::cosh(phi);
    sol.varpi = std::sqrt(3.0 * alpha) * std::sinh(phi);
    sol.varpi_sq = sol.varpi * sol.varpi;
  } else {
    // Overdamped: sin form; sgn(0) = 0 makes b = 0 give z1 = 0 exactly.
    const double phi = std::asin(std::min(gamma, 1.0)) / 3.0;
    sol.z1 = 2.0 * sqrt_alpha * sgn_b * std::sin(phi);
    const double mu = std::sqrt(3.0 * alpha) * std::cos(phi);
    sol.varpi = mu;
    sol.varpi_sq = -mu * mu;
  }

  // z_pm = -z1/2 +- i*varpi, with varpi = i*mu turning the pair real.
  const Complex iw = Complex(0.0, 1.0) * std::sqrt(Complex(sol.varpi_sq, 0.0));
  sol.z_plus = Complex(-0.5 * sol.z1, 0.0) + iw;
  sol.z_minus = Complex(-0.5 * sol.z1, 0.0) - iw;
  return sol;
}

}  // namespace bloch
