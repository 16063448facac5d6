#include "bloch/eigenframe.hpp"

#include <algorithm>
#include <cmath>

namespace bloch {

namespace {

constexpr double kColumnFloor = 1e-12;
constexpr double kFrameFloor = 1e-12;

template <typename Mat>
Mat adjugate3(const Mat& b) {
  // adj(B)(i,j) is the cofactor of B(j,i); cyclic index order absorbs signs.
  Mat adj;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const int r0 = (j + 1) % 3, r1 = (j + 2) % 3;
      const int c0 = (i + 1) % 3, c1 = (i + 2) % 3;
      adj(i, j) = b(r0, c0) * b(r1, c1) - b(r0, c1) * b(r1, c0);
    }
  }
  return adj;
}

// Column of m: evaluates adj A_p(z) = A0p + A1p z + Id z^2 at real z.
Matrix3 adjugate_poly(const Matrix3& a0p, const Matrix3& a1p, double z) {
  return a0p + z * a1p + z * z * Matrix3::Identity();
}

Vector3 pick_column(const Matrix3& m, std::optional<int> pinned, int* used) {
  const double floor = kColumnFloor * std::max(m.norm(), 1e-300);
  if (pinned) {
    const int j = *pinned - 1;
    if (j < 0 || j > 2) throw_error(ErrorCode::OutOfRange, "column index must be 1..3");
    if (m.col(j).norm() <= floor) {
      throw_error(ErrorCode::ZeroColumn, "pinned adjugate column is zero");
    }
    *used = *pinned;
    return m.col(j);
  }
  int best = 0;
  for (int j = 1; j < 3; ++j) {
    if (m.col(j).norm() > m.col(best).norm()) best = j;
  }
  if (m.col(best).norm() <= floor) {
    throw_error(ErrorCode::ZeroColumn, "adjugate matrix has no usable column");
  }
  *used = best + 1;
  return m.col(best);
}

}  // namespace

EigenFrame EigenFrame::normalized() const {
  EigenFrame out = *this;
  out.s1 = s1.normalized();
  out.s2 = s2.normalized();
  out.s3 = s3.normalized();
  out.p_matrix.col(0) = out.s1;
  out.p_matrix.col(1) = out.s2;
  out.p_matrix.col(2) = out.s3;
  out.p_inverse = frame_inverse(out);
  return out;
}

Vector3c adjugate_eigenvector(const Matrix3& m, Complex eigenvalue) {
  const Matrix3c b = eigenvalue * Matrix3c::Identity() - m.cast<Complex>();
  const Matrix3c adj = adjugate3(b);
  int best = 0;
  for (int j = 1; j < 3; ++j) {
    if (adj.col(j).norm() > adj.col(best).norm()) best = j;
  }
  const double scale = m.norm() + std::abs(eigenvalue);
  const Vector3c v = adj.col(best);
  if (v.norm() <= 1e-12 * scale * scale) {
    throw_error(ErrorCode::DegenerateEigenvalue,
                "adjugate columns vanish; eigenvalue is not simple");
  }
  const double residual = (m.cast<Complex>() * v - eigenvalue * v).norm();
  if (residual > 1e-9 * scale * v.norm()) {
    throw_error(ErrorCode::DegenerateEigenvalue,
                "residual check failed; value is not a distinct eigenvalue");
  }
  return v;
}

EigenFrame real_basis(const PartitionedSystem& p, const CubicSolution& sol,
                      std::optional<int> column) {
  if (sol.root_class == RootClass::CriticalDouble ||
      sol.root_class == RootClass::CriticalTriple) {
    throw_error(ErrorCode::NoFrame,
                "degenerate roots do not give a linearly independent basis");
  }

  const Matrix3 a1p = -p.gamma_p;
  const Matrix3 a0p = p.gamma_p * p.gamma_p + sol.a * Matrix3::Identity();
  const double z1 = sol.z1;

  EigenFrame frame;
  const Matrix3 m1 = adjugate_poly(a0p, a1p, z1);

  if (sol.root_class == RootClass::Underdamped) {
    // Real and imaginary parts of the adjugate column at z_plus. Keeping
    // the exact imaginary part (varpi folded into s3) makes the conjugated
    // propagator an exact rotation block.
    const double half = 0.5 * z1;
    const Matrix3 m2 = a0p - half * a1p + (half * half - sol.varpi_sq) * Matrix3::Identity();
    const Matrix3 m3 = sol.varpi * (a1p - z1 * Matrix3::Identity());

    int used = 1;
    if (column) {
      frame.s2 = pick_column(m2, column, &used);
      frame.s3 = pick_column(m3, column, &used);
      frame.s1 = pick_column(m1, column, &used);
    } else {
      int best = 0;
      double best_norm = -1.0;
      for (int j = 0; j < 3; ++j) {
        const double n = m2.col(j).squaredNorm() + m3.col(j).squaredNorm();
        if (n > best_norm) {
          best_norm = n;
          best = j;
        }
      }
      frame.s2 = m2.col(best);
      frame.s3 = m3.col(best);
      used = best + 1;
      // s1 spans a one-dimensional eigenspace; fall back to the largest
      // column if the paired one degenerates.
      if (m1.col(best).norm() > kColumnFloor * m1.norm()) {
        frame.s1 = m1.col(best);
      } else {
        int dummy = 0;
        frame.s1 = pick_column(m1, std::nullopt, &dummy);
      }
    }
    frame.column_used = used;
    frame.oscillatory = true;
    frame.r1s = std::abs(sol.r_bar - z1);
    frame.r2s = std::abs(sol.r_bar + 0.5 * z1);
    frame.r3s = frame.r2s;
    frame.varpi = sol.varpi;
  } else {
    const double z2 = sol.z_plus.real();
    const double z3 = sol.z_minus.real();
    int used = 1;
    frame.s1 = pick_column(m1, column, &used);
    frame.s2 = pick_column(adjugate_poly(a0p, a1p, z2), column, &used);
    frame.s3 = pick_column(adjugate_poly(a0p, a1p, z3), column, &used);
    frame.column_used = used;
    frame.oscillatory = false;
    frame.r1s = std::abs(sol.r_bar - z1);
    frame.r2s = std::abs(sol.r_bar - z2);
    frame.r3s = std::abs(sol.r_bar - z3);
    frame.varpi = 0.0;
  }

  frame.p_matrix.col(0) = frame.s1;
  frame.p_matrix.col(1) = frame.s2;
  frame.p_matrix.col(2) = frame.s3;
  frame.p_inverse = frame_inverse(frame);
  return frame;
}

Matrix3 frame_inverse(const EigenFrame& frame) {
  const Vector3 c23 = frame.s2.cross(frame.s3);
  const double det = frame.s1.dot(c23);
  const double scale = frame.s1.norm() * frame.s2.norm() * frame.s3.norm();
  if (std::abs(det) <= kFrameFloor * scale) {
    throw_error(ErrorCode::NearSingularFrame, "basis triple product below floor");
  }
  Matrix3 inv;
  inv.row(0) = c23.transpose() / det;
  inv.row(1) = frame.s3.cross(frame.s1).transpose() / det;
  inv.row(2) = frame.s1.cross(frame.s2).transpose() / det;
  return inv;
}

Vector3 transformed_evolution(const EigenFrame& frame, const CubicSolution& sol,
                              double r_bar, double t, const Vector3& m_tilde0) {
  if (frame.oscillatory) {
    const double e1 = std::exp((sol.z1 - r_bar) * t);
    const double e23 = std::exp((-0.5 * sol.z1 - r_bar) * t);
    const double c = std::cos(frame.varpi * t);
    const double s = std::sin(frame.varpi * t);
    return Vector3(e1 * m_tilde0(0),
                   e23 * (c * m_tilde0(1) + s * m_tilde0(2)),
                   e23 * (-s * m_tilde0(1) + c * m_tilde0(2)));
  }
  return Vector3(std::exp((sol.z1 - r_bar) * t) * m_tilde0(0),
                 std::exp((sol.z_plus.real() - r_bar) * t) * m_tilde0(1),
                 std::exp((sol.z_minus.real() - r_bar) * t) * m_tilde0(2));
}

Obliquity obliquity(const EigenFrame& frame) {
  const Vector3 n = frame.s2.cross(frame.s3);
  Obliquity out;
  // atan2 forms stay accurate for the nearly-parallel and
  // nearly-orthogonal limits.
  out.angle_s1_normal =
      std::atan2(frame.s1.cross(n).norm(), std::abs(frame.s1.dot(n)));
  out.plane_skew = std::atan2(std::abs(frame.s2.dot(frame.s3)),
                              frame.s2.cross(frame.s3).norm());
  return out;
}

}  // namespace bloch
