#include "bloch/regime.hpp"

#include <algorithm>
#include <cmath>

namespace bloch {

namespace {

constexpr int kMaxResolution = 4096;

// b_eta = 0 crossing of the boundary cubic.
const double kLambdaB = 0.75 * (std::sqrt(3.0) - 5.0 / 3.0);

}  // namespace

std::optional<BoundaryPair> degeneracy_boundaries(double lambda3) {
  if (!(lambda3 >= 0.0)) {
    throw_error(ErrorCode::NegativeInput, "lambda3 must be nonnegative");
  }
  if (lambda3 > 1.0) return std::nullopt;

  const double s = 8.0 * lambda3 + 1.0;
  const double num = std::abs(8.0 * lambda3 * lambda3 + 20.0 * lambda3 - 1.0);
  const double gamma_eta = std::clamp(num / (s * std::sqrt(s)), 0.0, 1.0);
  const double sgn = (lambda3 > kLambdaB) - (lambda3 < kLambdaB);
  const double theta1 = sgn * std::asin(gamma_eta) / 3.0;
  const double theta2 = M_PI / 3.0 - theta1;
  const double root_s = std::sqrt(s);
  const double eta1 = 4.5 * root_s * std::sin(theta1);
  const double eta2 = 4.5 * root_s * std::sin(theta2);

  BoundaryPair out;
  out.lambda12_lower = eta1 - lambda3 + 2.25;
  out.lambda12_upper = eta2 - lambda3 + 2.25;
  if (out.lambda12_lower > out.lambda12_upper) {
    std::swap(out.lambda12_lower, out.lambda12_upper);
  }
  return out;
}

CanonicalCoeffs scaled_coeffs(const ScaledPoint& pt) {
  CanonicalCoeffs c;
  c.a = (pt.lambda12 + pt.lambda3 - 9.0) / 3.0;
  c.b = (pt.lambda12 - 2.0 * pt.lambda3 - 6.0) / 3.0;
  return c;
}

RootClass classify_regime(const ScaledPoint& pt, double tol_rel) {
  if (!(pt.lambda12 >= 0.0) || !(pt.lambda3 >= 0.0)) {
    throw_error(ErrorCode::NegativeInput, "scaled coordinates must be nonnegative");
  }
  return classify(scaled_coeffs(pt), tol_rel);
}

Isoline root_isoline(double lambda_z) {
  if (!(lambda_z > -1.0) || lambda_z > 2.0) {
    throw_error(ErrorCode::OutOfRange, "lambda_z must lie in (-1, 2]");
  }
  Isoline line;
  line.slope = (2.0 - lambda_z) / (1.0 + lambda_z);
  line.intercept = 3.0 * (2.0 - lambda_z) * (1.0 + lambda_z);
  return line;
}

AtlasGrid atlas_grid(std::pair<double, double> lambda12_range,
                     std::pair<double, double> lambda3_range, int n12, int n3) {
  if (n12 < 1 || n3 < 1 || n12 > kMaxResolution || n3 > kMaxResolution) {
    throw_error(ErrorCode::ResolutionTooLarge, "grid resolution must be 1..4096 per axis");
  }
  if (!(lambda12_range.first >= 0.0) || !(lambda3_range.first >= 0.0) ||
      lambda12_range.second < lambda12_range.first ||
      lambda3_range.second < lambda3_range.first) {
    throw_error(ErrorCode::NegativeInput, "ranges must be nonnegative and ordered");
  }

  AtlasGrid grid;
  grid.n12 = n12;
  grid.n3 = n3;
  grid.cells.reserve(static_cast<size_t>(n12) * n3);
  const double d12 = lambda12_range.second - lambda12_range.first;
  const double d3 = lambda3_range.second - lambda3_range.first;
  for (int i3 = 0; i3 < n3; ++i3) {
    const double l3 = lambda3_range.first + (i3 + 0.5) * d3 / n3;
    for (int i12 = 0; i12 < n12; ++i12) {
      const double l12 = lambda12_range.first + (i12 + 0.5) * d12 / n12;
      AtlasCell cell;
      cell.lambda12 = l12;
      cell.lambda3 = l3;
      const CubicSolution sol = solve_roots(scaled_coeffs({l12, l3}), 0.0);
      cell.regime = sol.root_class;
      // Contour designation: where several roots are real, export the
      // largest; it is the sheet that continues z1 = 2 across the
      // overdamped band and down toward -1.
      cell.z1_over_rdelta = sol.z1;
      if (sol.root_class == RootClass::Overdamped ||
          sol.root_class == RootClass::CriticalDouble) {
        cell.z1_over_rdelta = std::max(
            {sol.z1, sol.z_plus.real(), sol.z_minus.real()});
      }
      cell.varpi_over_rdelta = sol.varpi_sq > 0.0 ? sol.varpi : 0.0;
      grid.cells.push_back(cell);
    }
  }
  return grid;
}

std::optional<ScaledPoint> scaled_point(const FieldVector& field,
                                        const RelaxationRates& rates) {
  if (!rates.transverse_equal()) {
    throw_error(ErrorCode::OutOfRange, "lambda scaling requires R1 == R2");
  }
  const double rd = rates.r_delta();
  if (rd == 0.0) return std::nullopt;
  const double unit = rd * rd / 3.0;
  return ScaledPoint{field.omega12_sq() / unit,
                     field.omega3 * field.omega3 / unit};
}

PhysicalRegime classify_physical(const FieldVector& field,
                                 const RelaxationRates& rates) {
  const auto pt = scaled_point(field, rates);
  if (!pt) return PhysicalRegime::EqualRates;
  switch (classify_regime(*pt)) {
    case RootClass::Underdamped: return PhysicalRegime::Underdamped;
    case RootClass::Overdamped: return PhysicalRegime::Overdamped;
    case RootClass::CriticalDouble: return PhysicalRegime::CriticalDouble;
    case RootClass::CriticalTriple: return PhysicalRegime::CriticalTriple;
  }
  return PhysicalRegime::Underdamped;
}

}  // namespace bloch
