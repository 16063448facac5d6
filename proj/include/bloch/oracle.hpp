#pragma once

#include "bloch/solution.hpp"
#include "bloch/types.hpp"

namespace bloch {

/// Brute-force references; independent of the closed-form paths and never
/// called by them.
struct OracleConfig {
  double taylor_tolerance = 1e-19;  // relative series cutoff
  double scaling_threshold = 1.0;   // Frobenius norm bound before squaring
  double rk4_step = 0.0;            // seconds; 0 selects a conservative step
};

/// Scaling-and-squaring matrix exponential.
///
/// Scales m by 2^-k until the Frobenius norm is at or below the threshold,
/// sums the Taylor series until terms fall below taylor_tolerance relative
/// to the partial sum, then squares k times. The backward error is that of
/// a truncated series on the scaled matrix amplified by the k squarings,
/// which for the 3x3 systems here stays near roundoff until norm(m) t
/// reaches ~1e6.
Matrix3 expm_reference(const Matrix3& m, const OracleConfig& cfg = {});

/// Classical fixed-step RK4 integration of Mdot = -Gamma M + (0,0,m0 r3).
Magnetization integrate_reference(const GammaMatrix& g, const Magnetization& m_init,
                                  double m0, double t_end,
                                  const OracleConfig& cfg = {});

}  // namespace bloch
