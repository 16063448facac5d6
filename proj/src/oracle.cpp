#include "bloch/oracle.hpp"

#include <cmath>

namespace bloch {

Matrix3 expm_reference(const Matrix3& m, const OracleConfig& cfg) {
  if (!m.allFinite()) {
    throw_error(ErrorCode::NonFinite, "matrix exponential of non-finite matrix");
  }
  if (!(cfg.taylor_tolerance > 0.0) || !(cfg.scaling_threshold > 0.0)) {
    throw_error(ErrorCode::OutOfRange, "oracle tolerances must be positive");
  }
  // Extended precision internally: the k squarings amplify rounding by
  // ~2^k in the oscillatory directions, so the reference is evaluated in
  // long double and rounded once at the end.
  using LMatrix3 = Eigen::Matrix<long double, 3, 3>;
  const double norm = m.norm();
  int k = 0;
  if (norm > cfg.scaling_threshold) {
    k = static_cast<int>(std::ceil(std::log2(norm / cfg.scaling_threshold)));
  }
  const LMatrix3 a = m.cast<long double>() / std::ldexp(1.0L, k);

  LMatrix3 sum = LMatrix3::Identity();
  LMatrix3 term = LMatrix3::Identity();
  for (int n = 1; n <= 60; ++n) {
    term = (term * a) / static_cast<long double>(n);
    sum += term;
    if (static_cast<double>(term.norm()) <=
        cfg.taylor_tolerance * static_cast<double>(sum.norm())) {
      break;
    }
  }
  for (int i = 0; i < k; ++i) sum = sum * sum;
  return sum.cast<double>();
}

Magnetization integrate_reference(const GammaMatrix& g, const Magnetization& m_init,
                                  double m0, double t_end, const OracleConfig& cfg) {
  if (!(t_end >= 0.0)) {
    throw_error(ErrorCode::NegativeTime, "integration requires t_end >= 0");
  }
  const double scale = std::max({g.m.norm(), g.field.omega_e(), 1e-300});
  double h = cfg.rk4_step;
  if (h > 0.1 / scale) {
    throw_error(ErrorCode::StepTooLarge, "rk4 step exceeds 0.1 / max(|Gamma|, omega_e)");
  }
  if (h <= 0.0) h = 0.01 / scale;
  if (t_end == 0.0) return m_init;

  const long steps = std::max(1L, std::lround(std::ceil(t_end / h)));
  h = t_end / static_cast<double>(steps);

  const Vector3 drive(0.0, 0.0, m0 * g.rates.r3);
  const auto f = [&](const Vector3& m) -> Vector3 { return drive - g.m * m; };

  Vector3 m = m_init.vec();
  for (long i = 0; i < steps; ++i) {
    const Vector3 k1 = f(m);
    const Vector3 k2 = f(m + 0.5 * h * k1);
    const Vector3 k3 = f(m + 0.5 * h * k2);
    const Vector3 k4 = f(m + h * k3);
    m += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return Magnetization::from(m);
}

}  // namespace bloch
