#include "bloch/types.hpp"

#include <cmath>

namespace bloch {

GammaMatrix build_gamma(const FieldVector& field, const RelaxationRates& rates) {
  const double vals[] = {field.omega1, field.omega2, field.omega3,
                         rates.r1, rates.r2, rates.r3};
  for (double v : vals) {
    if (!std::isfinite(v)) {
      throw_error(ErrorCode::NonFiniteInput, "field/rate component is not finite");
    }
  }
  if (rates.r1 < 0.0 || rates.r2 < 0.0 || rates.r3 < 0.0) {
    throw_error(ErrorCode::NegativeRate, "relaxation rates must be nonnegative");
  }

  GammaMatrix g;
  g.field = field;
  g.rates = rates;
  g.m << rates.r1, field.omega3, -field.omega2,
      -field.omega3, rates.r2, field.omega1,
      field.omega2, -field.omega1, rates.r3;
  return g;
}

PartitionedSystem partition(const GammaMatrix& g) {
  PartitionedSystem p;
  p.r_bar = g.m.trace() / 3.0;
  p.gamma_p = g.m - p.r_bar * Matrix3::Identity();
  return p;
}

CouplingSet gamma_squared_couplings(const GammaMatrix& g) {
  const Vector3 w = g.field.vec();
  const Vector3 r = g.rates.vec();

  CouplingSet c;
  c.gamma_sq = g.m * g.m;
  c.kappa = w * w.transpose();
  c.sigma.setZero();
  c.sigma(0, 1) = (r(0) + r(1)) * w(2);
  c.sigma(1, 2) = (r(1) + r(2)) * w(0);
  c.sigma(2, 0) = (r(2) + r(0)) * w(1);
  c.sigma(1, 0) = -c.sigma(0, 1);
  c.sigma(2, 1) = -c.sigma(1, 2);
  c.sigma(0, 2) = -c.sigma(2, 0);
  for (int i = 0; i < 3; ++i) {
    double off = 0.0;
    for (int j = 0; j < 3; ++j) {
      if (j != i) off += c.kappa(i, j) + c.sigma(i, j);
    }
    c.k_diag(i) = -c.gamma_sq(i, i) - off;
  }
  return c;
}

}  // namespace bloch
