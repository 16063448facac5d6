#include "bloch/propagator.hpp"

#include <cmath>

#include "dd.hpp"

namespace bloch {

namespace {

// Root magnitudes at or below this fraction of |GammaP| are numerically
// indistinguishable from the coefficient rounding floor (a, b pick up
// O(eps) * scale noise, so roots carry O(cbrt(eps)) * scale noise).
constexpr double kTripleRootFloor = 3e-5;

// q'(z1) smaller than this fraction of its natural scale marks z1 as a
// member of a colliding pair; the double-root branch takes over.
constexpr double kRerouteFloor = 1e-6;

// Series fallback threshold for sin(x)/x and sinh(x)/x.
constexpr double kSincSeriesCutoff = 1e-4;

struct TimeBasis {
  double u0, u1, u2;
};

// u-vector of the distinct-root solution with the overall e^{-rBar t}
// decay folded into each component, so every entry stays bounded for
// physical (decaying) systems.
TimeBasis distinct_basis(const CubicSolution& sol, double r_bar, double t) {
  const double z1 = sol.z1;
  const double u0 = std::exp((z1 - r_bar) * t);
  const double envelope = std::exp((-0.5 * z1 - r_bar) * t);
  if (sol.varpi_sq >= 0.0) {
    const detail::DD phase = detail::dd_add(detail::two_prod(sol.varpi, t),
                                            detail::two_prod(sol.varpi_lo, t));
    const double x = phase.hi;
    if (std::abs(x) < kSincSeriesCutoff) {
      const double sinc = t * (1.0 - (x * x / 6.0) * (1.0 - x * x / 20.0));
      return {u0, envelope * std::cos(x), envelope * sinc};
    }
    const double reduced = detail::dd_reduce_two_pi(phase);
    return {u0, envelope * std::cos(reduced),
            envelope * std::sin(reduced) / sol.varpi};
  }
  const double mu = sol.varpi;
  const double x = mu * t;
  if (x <= 1.0) {
    double shc;
    if (x < kSincSeriesCutoff) {
      shc = t * (1.0 + (x * x / 6.0) * (1.0 + x * x / 20.0));
    } else {
      shc = std::sinh(x) / mu;
    }
    return {u0, envelope * std::cosh(x), envelope * shc};
  }
  // Large hyperbolic arguments: assemble from the shifted-root exponentials
  // directly, which cannot overflow while the true solution decays.
  const double ep = std::exp((-0.5 * z1 + mu - r_bar) * t);
  const double em = std::exp((-0.5 * z1 - mu - r_bar) * t);
  return {u0, 0.5 * (ep + em), 0.5 * (ep - em) / mu};
}

std::array<double, 3> distinct_coeffs(const CubicSolution& sol, double a,
                                      double r_bar, double t) {
  const auto [u0, u1, u2] = distinct_basis(sol, r_bar, t);
  const double z1 = sol.z1;
  const double qp = 3.0 * z1 * z1 + a;  // q'(z1)
  return {((z1 * z1 + a) * u0 + 2.0 * z1 * z1 * u1 - a * z1 * u2) / qp,
          (-z1 * u0 + z1 * u1 - (1.5 * z1 * z1 + a) * u2) / qp,
          (u0 - u1 - 1.5 * z1 * u2) / qp};
}

std::array<double, 3> double_coeffs(double z1, double r_bar, double t) {
  const double e1 = std::exp((z1 - r_bar) * t);
  const double e2 = std::exp((-0.5 * z1 - r_bar) * t);
  const double diff = e2 * std::expm1(1.5 * z1 * t);  // u0 - u1, cancellation-free
  return {e1 / 9.0 + e2 * (8.0 / 9.0 + z1 * t / 3.0),
          -(4.0 / (9.0 * z1)) * diff - (t / 3.0) * e2,
          (4.0 / (9.0 * z1 * z1)) * diff - (2.0 * t / (3.0 * z1)) * e2};
}

std::array<double, 3> triple_coeffs(double r_bar, double t) {
  const double e = std::exp(-r_bar * t);
  return {e, -t * e, 0.5 * t * t * e};
}

Propagator assemble(const PartitionedSystem& p, const CubicSolution& sol,
                    RootClass branch, const std::array<double, 3>& coeffs, double t) {
  Propagator out;
  out.t = t;
  out.branch = branch;
  out.roots = sol;
  out.m = coeffs[0] * Matrix3::Identity() + coeffs[1] * p.gamma_p +
          coeffs[2] * (p.gamma_p * p.gamma_p);
  return out;
}

Propagator identity_propagator(const PartitionedSystem&, const CubicSolution& sol,
                               RootClass branch) {
  Propagator out;
  out.t = 0.0;
  out.branch = branch;
  out.roots = sol;
  out.m = Matrix3::Identity();
  return out;
}

void require_nonnegative_time(double t) {
  if (!(t >= 0.0)) {
    throw_error(ErrorCode::NegativeTime, "propagator requires t >= 0");
  }
}

double max_root_magnitude(const CubicSolution& sol) {
  return std::max(std::abs(sol.z1), std::abs(sol.z_plus));
}

}  // namespace

AdjugateCoeffs adjugate_coeffs(const PartitionedSystem& p, double a) {
  AdjugateCoeffs out;
  out.a1p = -p.gamma_p;
  out.a0p = p.gamma_p * p.gamma_p + a * Matrix3::Identity();
  return out;
}

std::array<double, 3> ch_coefficients(const CubicSolution& sol, double a, double t) {
  require_nonnegative_time(t);
  switch (sol.root_class) {
    case RootClass::Underdamped:
    case RootClass::Overdamped:
      return distinct_coeffs(sol, a, 0.0, t);
    case RootClass::CriticalDouble:
      if (sol.z1 == 0.0) {
        throw_error(ErrorCode::ZeroRootInDoubleBranch,
                    "double-root coefficients need z1 != 0");
      }
      return double_coeffs(sol.z1, 0.0, t);
    case RootClass::CriticalTriple:
      return triple_coeffs(0.0, t);
  }
  throw_error(ErrorCode::BranchMismatch, "unknown root class");
}

Propagator propagator_distinct(const PartitionedSystem& p, const CubicSolution& sol,
                               double t) {
  require_nonnegative_time(t);
  if (sol.root_class != RootClass::Underdamped &&
      sol.root_class != RootClass::Overdamped) {
    throw_error(ErrorCode::BranchMismatch,
                "distinct-root branch requires underdamped or overdamped roots");
  }
  if (t == 0.0) return identity_propagator(p, sol, sol.root_class);
  return assemble(p, sol, sol.root_class, distinct_coeffs(sol, sol.a, p.r_bar, t), t);
}

Propagator propagator_double(const PartitionedSystem& p, const CubicSolution& sol,
                             double t) {
  require_nonnegative_time(t);
  if (sol.root_class != RootClass::CriticalDouble) {
    throw_error(ErrorCode::BranchMismatch,
                "double-root branch requires a two-fold degenerate root");
  }
  const double floor = kTripleRootFloor * p.gamma_p.norm();
  if (std::abs(sol.z1) <= floor) {
    throw_error(ErrorCode::ZeroRootInDoubleBranch,
                "degenerate root too close to zero; use the triple branch");
  }
  if (t == 0.0) return identity_propagator(p, sol, RootClass::CriticalDouble);
  return assemble(p, sol, RootClass::CriticalDouble,
                  double_coeffs(sol.z1, p.r_bar, t), t);
}

Propagator propagator_triple(const PartitionedSystem& p, double t) {
  require_nonnegative_time(t);
  const CubicSolution sol = solve_roots(canonical_coeffs(p), p.r_bar);
  if (t == 0.0) return identity_propagator(p, sol, RootClass::CriticalTriple);
  return assemble(p, sol, RootClass::CriticalTriple, triple_coeffs(p.r_bar, t), t);
}

Propagator propagator(const GammaMatrix& g, double t) {
  require_nonnegative_time(t);
  const PartitionedSystem p = partition(g);
  const CanonicalCoeffs cc = canonical_coeffs(p);
  CubicSolution sol = solve_roots(cc, p.r_bar);

  const double scale = p.gamma_p.norm();
  if (sol.root_class == RootClass::CriticalTriple ||
      max_root_magnitude(sol) <= kTripleRootFloor * scale) {
    Propagator out = propagator_triple(p, t);
    out.roots = sol;
    return out;
  }
  if (sol.root_class == RootClass::CriticalDouble) {
    if (std::abs(sol.z1) <= kTripleRootFloor * scale) return propagator_triple(p, t);
    return propagator_double(p, sol, t);
  }

  // Near-degeneracy conditioning: q'(z1) -> 0 means z1 belongs to a
  // colliding pair, so swap in the non-degenerate root and treat the pair
  // as exactly double.
  const double qp = 3.0 * sol.z1 * sol.z1 + sol.a;
  if (std::abs(qp) < kRerouteFloor * std::max(sol.z1 * sol.z1, std::abs(sol.a))) {
    const double c_plus = sol.z_plus.real();
    const double c_minus = sol.z_minus.real();
    const double partner = (std::abs(sol.z1 - c_plus) < std::abs(sol.z1 - c_minus))
                               ? c_plus
                               : c_minus;
    CubicSolution deg = sol;
    deg.root_class = RootClass::CriticalDouble;
    deg.z1 = -(sol.z1 + partner);
    deg.varpi = 0.0;
    deg.varpi_sq = 0.0;
    deg.z_plus = Complex(-0.5 * deg.z1, 0.0);
    deg.z_minus = deg.z_plus;
    if (std::abs(deg.z1) <= kTripleRootFloor * scale) return propagator_triple(p, t);
    return propagator_double(p, deg, t);
  }
  return propagator_distinct(p, sol, t);
}

}  // namespace bloch
