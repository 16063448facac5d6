#pragma once

#include <optional>

#include "bloch/cubic.hpp"
#include "bloch/types.hpp"

namespace bloch {

using Vector3c = Eigen::Vector3cd;
using Matrix3c = Eigen::Matrix3cd;

/// Oblique real basis in which the propagator factors into commuting
/// relaxation and (for the oscillatory case) an in-plane rotation.
struct EigenFrame {
  Vector3 s1, s2, s3;
  Matrix3 p_matrix;   // columns s1, s2, s3
  Matrix3 p_inverse;
  double r1s = 0.0;   // |rBar - z1|
  double r2s = 0.0;   // |rBar + z1/2| (oscillatory), |rBar - z2| otherwise
  double r3s = 0.0;   // equals r2s for the oscillatory case
  double varpi = 0.0; // in-plane angular frequency, 0 for three real roots
  int column_used = 1;       // 1..3, adjugate column that built the basis
  bool oscillatory = true;   // false when the basis is the real eigenbasis

  /// Copy with unit basis vectors, for export and plotting.
  EigenFrame normalized() const;
};

struct Obliquity {
  double angle_s1_normal = 0.0;  // angle between s1 and the (s2,s3)-plane normal
  double plane_skew = 0.0;       // |pi/2 - angle(s2, s3)|
};

/// Eigenvector of m at a distinct eigenvalue, read off adj(ev*Id - m).
Vector3c adjugate_eigenvector(const Matrix3& m, Complex eigenvalue);

EigenFrame real_basis(const PartitionedSystem& p, const CubicSolution& sol,
                      std::optional<int> column = std::nullopt);

/// Rows are cross products of basis pairs over the triple product.
Matrix3 frame_inverse(const EigenFrame& frame);

/// Time evolution of a state expressed in frame coordinates.
Vector3 transformed_evolution(const EigenFrame& frame, const CubicSolution& sol,
                              double r_bar, double t, const Vector3& m_tilde0);

Obliquity obliquity(const EigenFrame& frame);

}  // namespace bloch
