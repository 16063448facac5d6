#include "doctest.h"

#include <cmath>

#include "bloch/sampling.hpp"
#include "bloch/types.hpp"

using namespace bloch;

namespace {

// Torque + relaxation form of the equation of motion, used as an
// independent check on the assembled matrix.
Vector3 rhs_from_components(const FieldVector& w, const RelaxationRates& r,
                            const Vector3& m) {
  return w.vec().cross(m) - Vector3(r.r1 * m(0), r.r2 * m(1), r.r3 * m(2));
}

}  // namespace

TEST_CASE("build_gamma assembles rates and field with the torque sign convention") {
  const GammaMatrix zero = build_gamma({0, 0, 0}, {0, 0, 0});
  CHECK(zero.m.isZero(0.0));

  const FieldVector w{1.5, -2.0, 3.25};
  const RelaxationRates r{0.5, 1.0, 2.0};
  const GammaMatrix g = build_gamma(w, r);
  Matrix3 expected;
  expected << r.r1, w.omega3, -w.omega2,
      -w.omega3, r.r2, w.omega1,
      w.omega2, -w.omega1, r.r3;
  CHECK(g.m == expected);

  // -Gamma M must reproduce w x M - R o M exactly.
  SplitMix64 rng(7);
  for (int i = 0; i < 50; ++i) {
    const Vector3 m(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Vector3 lhs = -g.m * m;
    const Vector3 ref = rhs_from_components(w, r, m);
    CHECK((lhs - ref).norm() <= 1e-14 * (ref.norm() + 1.0));
  }
}

TEST_CASE("build_gamma frozen example") {
  const GammaMatrix g = build_gamma({0, 0, 5}, {1, 1, 2});
  Matrix3 expected;
  expected << 1, 5, 0, -5, 1, 0, 0, 0, 2;
  CHECK(g.m == expected);
}

TEST_CASE("build_gamma rejects bad input") {
  CHECK_THROWS_AS(build_gamma({std::nan(""), 0, 0}, {1, 1, 1}), BlochError);
  CHECK_THROWS_AS(build_gamma({0, 0, 0}, {1, -1, 1}), BlochError);
  try {
    build_gamma({0, 0, 0}, {1, -1, 1});
  } catch (const BlochError& e) {
    CHECK(e.code() == ErrorCode::NegativeRate);
  }
}

TEST_CASE("partition splits off the average rate") {
  SUBCASE("equal rates leave a zero diagonal") {
    const auto p = partition(build_gamma({3, -1, 2}, {1, 1, 1}));
    CHECK(p.r_bar == doctest::Approx(1.0).epsilon(1e-15));
    for (int i = 0; i < 3; ++i) CHECK(p.gamma_p(i, i) == doctest::Approx(0.0));
  }
  SUBCASE("R1 == R2 gives diagonal (Rdelta, Rdelta, -2 Rdelta)") {
    const RelaxationRates r{4.0, 4.0, 1.0};
    const auto p = partition(build_gamma({0.3, 0.7, 0.1}, r));
    const double rd = r.r_delta();
    CHECK(p.gamma_p(0, 0) == doctest::Approx(rd).epsilon(1e-14));
    CHECK(p.gamma_p(1, 1) == doctest::Approx(rd).epsilon(1e-14));
    CHECK(p.gamma_p(2, 2) == doctest::Approx(-2.0 * rd).epsilon(1e-14));
  }
  SUBCASE("frozen arithmetic example") {
    const auto p = partition(build_gamma({0, 0, 0}, {2, 4, 6}));
    CHECK(p.r_bar == 4.0);
    CHECK(p.gamma_p(0, 0) == -2.0);
    CHECK(p.gamma_p(1, 1) == 0.0);
    CHECK(p.gamma_p(2, 2) == 2.0);
  }
}

TEST_CASE("partition reconstruction and trace properties") {
  SplitMix64 rng(11);
  for (int i = 0; i < 10000; ++i) {
    const SystemSample s = sample_system(rng, true);
    const GammaMatrix g = build_gamma(s.field, s.rates);
    const PartitionedSystem p = partition(g);

    const Matrix3 rebuilt = p.gamma_p + p.r_bar * Matrix3::Identity();
    const double max_entry = g.m.cwiseAbs().maxCoeff();
    CHECK((rebuilt - g.m).cwiseAbs().maxCoeff() <= 2e-16 * max_entry);

    const double rmax = std::max({std::abs(s.rates.r1), std::abs(s.rates.r2),
                                  std::abs(s.rates.r3), 1.0});
    CHECK(std::abs(p.gamma_p.trace()) <= 1e-12 * rmax);
  }
}

TEST_CASE("gamma squared couplings") {
  SUBCASE("pure relaxation has no couplings") {
    const auto c = gamma_squared_couplings(build_gamma({0, 0, 0}, {1, 2, 3}));
    CHECK(c.gamma_sq.isApprox(Vector3(1, 4, 9).asDiagonal().toDenseMatrix()));
    CHECK(c.kappa.isZero(0.0));
    CHECK(c.sigma.isZero(0.0));
  }
  SUBCASE("matches the displayed Gamma^2 elementwise") {
    const FieldVector w{1.2, -0.4, 2.1};
    const RelaxationRates r{0.3, 0.9, 1.7};
    const auto c = gamma_squared_couplings(build_gamma(w, r));
    Matrix3 expected;
    expected << -(w.omega2 * w.omega2 + w.omega3 * w.omega3) + r.r1 * r.r1,
        w.omega1 * w.omega2 + w.omega3 * (r.r1 + r.r2),
        w.omega1 * w.omega3 - w.omega2 * (r.r1 + r.r3),
        w.omega1 * w.omega2 - w.omega3 * (r.r1 + r.r2),
        -(w.omega1 * w.omega1 + w.omega3 * w.omega3) + r.r2 * r.r2,
        w.omega2 * w.omega3 + w.omega1 * (r.r2 + r.r3),
        w.omega1 * w.omega3 + w.omega2 * (r.r1 + r.r3),
        w.omega2 * w.omega3 - w.omega1 * (r.r2 + r.r3),
        -(w.omega1 * w.omega1 + w.omega2 * w.omega2) + r.r3 * r.r3;
    CHECK((c.gamma_sq - expected).cwiseAbs().maxCoeff() <=
          1e-13 * expected.cwiseAbs().maxCoeff());
  }
  SUBCASE("free precession with R1 == R2") {
    const double w3 = 5.0, r12 = 2.0;
    const auto c = gamma_squared_couplings(build_gamma({0, 0, w3}, {r12, r12, 0.7}));
    CHECK(c.sigma(0, 1) == doctest::Approx(2.0 * r12 * w3));
    CHECK(c.kappa(0, 1) == 0.0);
    CHECK(c.kappa(1, 2) == 0.0);
    CHECK(c.kappa(0, 2) == 0.0);
  }
}

TEST_CASE("coupling set properties over random systems") {
  SplitMix64 rng(13);
  for (int i = 0; i < 10000; ++i) {
    const SystemSample s = sample_system(rng, true);
    const GammaMatrix g = build_gamma(s.field, s.rates);
    const auto c = gamma_squared_couplings(g);

    // Assembled symmetry holds exactly.
    CHECK(c.kappa(0, 1) == c.kappa(1, 0));
    CHECK(c.kappa(0, 2) == c.kappa(2, 0));
    CHECK(c.kappa(1, 2) == c.kappa(2, 1));
    CHECK(c.sigma(0, 1) == -c.sigma(1, 0));
    CHECK(c.sigma(0, 2) == -c.sigma(2, 0));
    CHECK(c.sigma(1, 2) == -c.sigma(2, 1));

    const Matrix3 numeric = g.m * g.m;
    CHECK((c.gamma_sq - numeric).cwiseAbs().maxCoeff() <=
          1e-13 * numeric.cwiseAbs().maxCoeff());

    // kappa + sigma reproduces the off-diagonal couplings of Gamma^2.
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        if (a == b) continue;
        const double k = c.kappa(a, b) + c.sigma(a, b);
        const double term_scale =
            std::abs(c.kappa(a, b)) + std::abs(c.sigma(a, b)) + 1.0;
        CHECK(std::abs(k - c.gamma_sq(a, b)) <= 1e-12 * term_scale);
      }
    }
  }
}

TEST_CASE("field vector derived magnitudes") {
  const FieldVector w{3.0, 4.0, 12.0};
  CHECK(w.omega12() == doctest::Approx(5.0));
  CHECK(w.omega_e() == doctest::Approx(13.0));
  CHECK(w.phase() == doctest::Approx(std::atan2(4.0, 3.0)));
}
