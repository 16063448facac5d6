#pragma once

#include <span>
#include <utility>
#include <vector>

#include "bloch/propagator.hpp"
#include "bloch/types.hpp"

namespace bloch {

struct Magnetization {
  double mx = 0.0;
  double my = 0.0;
  double mz = 0.0;

  Vector3 vec() const { return Vector3(mx, my, mz); }
  static Magnetization from(const Vector3& v) { return {v(0), v(1), v(2)}; }
};

/// Steady state M_inf solving Gamma * M = (0, 0, m0) * r3.
Magnetization steady_state(const GammaMatrix& g, double m0);

/// Closed-form M(t) = P(t) (M(0) - M_inf) + M_inf.
Magnetization evolve(const GammaMatrix& g, const Magnetization& m_init, double m0,
                     double t);

/// Pointwise closed-form samples along an ordered time grid.
std::vector<std::pair<double, Magnetization>> trajectory(
    const GammaMatrix& g, const Magnetization& m_init, double m0,
    std::span<const double> t_grid);

}  // namespace bloch
