#include "bloch/solution.hpp"

#include <cmath>

namespace bloch {

namespace {

constexpr double kSingularFloor = 16.0 * 2.220446049250313e-16;

}  // namespace

namespace {

// adj(Gamma), i.e. the s = 0 value of the adjugate polynomial.
Matrix3 gamma_adjugate(const GammaMatrix& g) {
  const auto& w = g.field;
  const auto& r = g.rates;
  Matrix3 adj;
  adj << w.omega1 * w.omega1 + r.r2 * r.r3,
      w.omega1 * w.omega2 - w.omega3 * r.r3,
      w.omega1 * w.omega3 + w.omega2 * r.r2,
      w.omega1 * w.omega2 + w.omega3 * r.r3,
      w.omega2 * w.omega2 + r.r1 * r.r3,
      w.omega2 * w.omega3 - w.omega1 * r.r1,
      w.omega1 * w.omega3 - w.omega2 * r.r2,
      w.omega2 * w.omega3 + w.omega1 * r.r1,
      w.omega3 * w.omega3 + r.r1 * r.r2;
  return adj;
}

}  // namespace

Magnetization steady_state(const GammaMatrix& g, double m0) {
  const auto& w = g.field;
  const auto& r = g.rates;
  const double c0 = char_poly_coeffs(g).c0;  // det(Gamma)
  const double scale = std::max({std::abs(r.r1), std::abs(r.r2), std::abs(r.r3),
                                 std::abs(w.omega1), std::abs(w.omega2),
                                 std::abs(w.omega3)});
  if (c0 <= kSingularFloor * scale * scale * scale) {
    throw_error(ErrorCode::SingularGamma,
                "Gamma is singular; no unique steady state");
  }
  const Matrix3 adj = gamma_adjugate(g);
  const Vector3 rhs(0.0, 0.0, m0 * r.r3);
  Vector3 m = adj.col(2) * (rhs(2) / c0);

  // One refinement step with a compensated residual keeps the fixed-point
  // defect near roundoff of the right-hand side even for stiff systems.
  Vector3 residual;
  for (int i = 0; i < 3; ++i) {
    long double acc = static_cast<long double>(rhs(i));
    for (int j = 0; j < 3; ++j) {
      acc -= static_cast<long double>(g.m(i, j)) * static_cast<long double>(m(j));
    }
    residual(i) = static_cast<double>(acc);
  }
  m += adj * residual / c0;
  return Magnetization::from(m);
}

Magnetization evolve(const GammaMatrix& g, const Magnetization& m_init, double m0,
                     double t) {
  const Magnetization m_inf = steady_state(g, m0);
  const Propagator p = propagator(g, t);
  return Magnetization::from(p.m * (m_init.vec() - m_inf.vec()) + m_inf.vec());
}

std::vector<std::pair<double, Magnetization>> trajectory(
    const GammaMatrix& g, const Magnetization& m_init, double m0,
    std::span<const double> t_grid) {
  double prev = 0.0;
  for (double t : t_grid) {
    if (!(t >= 0.0)) throw_error(ErrorCode::NegativeTime, "time grid must be nonnegative");
    if (t < prev) throw_error(ErrorCode::OutOfRange, "time grid must be nondecreasing");
    prev = t;
  }
  const Magnetization m_inf = steady_state(g, m0);
  const Vector3 dev0 = m_init.vec() - m_inf.vec();
  std::vector<std::pair<double, Magnetization>> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    const Propagator p = propagator(g, t);
    out.emplace_back(t, Magnetization::from(p.m * dev0 + m_inf.vec()));
  }
  return out;
}

}  // namespace bloch
