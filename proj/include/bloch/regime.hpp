#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "bloch/cubic.hpp"
#include "bloch/types.hpp"

namespace bloch {

/// Field magnitudes scaled by Rdelta^2/3 (valid for R1 == R2, Rdelta > 0).
struct ScaledPoint {
  double lambda12 = 0.0;
  double lambda3 = 0.0;
};

struct BoundaryPair {
  double lambda12_lower = 0.0;
  double lambda12_upper = 0.0;
};

/// The two lambda12 values with degenerate roots, for lambda3 in [0, 1];
/// none above 1.
std::optional<BoundaryPair> degeneracy_boundaries(double lambda3);

/// Canonical coefficients at a scaled point, in Rdelta = 1 units.
CanonicalCoeffs scaled_coeffs(const ScaledPoint& pt);

RootClass classify_regime(const ScaledPoint& pt, double tol_rel = kDegeneracyTol);

struct Isoline {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Line lambda12 = slope*lambda3 + intercept on which z1 = lambda_z * Rdelta.
Isoline root_isoline(double lambda_z);

struct AtlasCell {
  double lambda12 = 0.0;
  double lambda3 = 0.0;
  RootClass regime = RootClass::Underdamped;
  double z1_over_rdelta = 0.0;
  double varpi_over_rdelta = 0.0;  // 0 where the evolution is non-oscillatory
};

struct AtlasGrid {
  int n12 = 0;
  int n3 = 0;
  std::vector<AtlasCell> cells;  // row-major: lambda3 outer, lambda12 inner
};

AtlasGrid atlas_grid(std::pair<double, double> lambda12_range,
                     std::pair<double, double> lambda3_range, int n12, int n3);

/// Physical regime of an R1 == R2 system; EqualRates when Rdelta == 0, in
/// which case the lambda scaling is undefined.
enum class PhysicalRegime {
  Underdamped,
  Overdamped,
  CriticalDouble,
  CriticalTriple,
  EqualRates,
};

/// Scaled coordinates of an R1 == R2 system; nullopt when Rdelta == 0.
std::optional<ScaledPoint> scaled_point(const FieldVector& field,
                                        const RelaxationRates& rates);
PhysicalRegime classify_physical(const FieldVector& field,
                                 const RelaxationRates& rates);

}  // namespace bloch
