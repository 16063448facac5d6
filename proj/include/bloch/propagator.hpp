#pragma once

#include <array>

#include "bloch/cubic.hpp"
#include "bloch/types.hpp"

namespace bloch {

/// adj(z*Id + GammaP) = a0p + a1p*z + Id*z^2.
struct AdjugateCoeffs {
  Matrix3 a0p;  // GammaP^2 + a*Id
  Matrix3 a1p;  // -GammaP
};

struct Propagator {
  Matrix3 m;  // e^{-Gamma t}
  double t = 0.0;
  RootClass branch = RootClass::CriticalTriple;
  CubicSolution roots;
};

AdjugateCoeffs adjugate_coeffs(const PartitionedSystem& p, double a);

/// Cayley-Hamilton coefficients of e^{-GammaP t} = a0*Id + a1*GammaP + a2*GammaP^2.
std::array<double, 3> ch_coefficients(const CubicSolution& sol, double a, double t);

Propagator propagator_distinct(const PartitionedSystem& p, const CubicSolution& sol, double t);
Propagator propagator_double(const PartitionedSystem& p, const CubicSolution& sol, double t);
Propagator propagator_triple(const PartitionedSystem& p, double t);

/// Classifies the root structure and dispatches to the matching branch.
Propagator propagator(const GammaMatrix& g, double t);

}  // namespace bloch
