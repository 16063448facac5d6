#include "doctest.h"

#include <cmath>

#include "bloch/oracle.hpp"
#include "bloch/propagator.hpp"
#include "bloch/sampling.hpp"

using namespace bloch;

namespace {

// Rdelta = 1 worker: rates (3,3,0) so rBar = 2 and the e^{+rBar t} factor
// recovers e^{-GammaP t} from the full propagator.
GammaMatrix golden_system(double w1) { return build_gamma({w1, 0, 0}, {3, 3, 0}); }

Matrix3 gamma_p_exponential(const GammaMatrix& g, double t) {
  return propagator(g, t).m * std::exp(2.0 * t);
}

double max_abs_diff(const Matrix3& a, const Matrix3& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Independent adjugate via explicit 2x2 cofactors, row/column deletions
// spelled out.
Matrix3 adjugate_by_cofactors(const Matrix3& m) {
  Matrix3 adj;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      int rows[2], cols[2], ri = 0, ci = 0;
      for (int k = 0; k < 3; ++k) {
        if (k != j) rows[ri++] = k;
        if (k != i) cols[ci++] = k;
      }
      const double minor = m(rows[0], cols[0]) * m(rows[1], cols[1]) -
                           m(rows[0], cols[1]) * m(rows[1], cols[0]);
      adj(i, j) = (((i + j) % 2) ? -1.0 : 1.0) * minor;
    }
  }
  return adj;
}

CubicSolution solve_for(const PartitionedSystem& p, double tol = kDegeneracyTol) {
  return solve_roots(canonical_coeffs(p), p.r_bar, tol);
}

}  // namespace

TEST_CASE("adjugate_coeffs") {
  SUBCASE("zero field and equal rates collapse to a*Id and 0") {
    const PartitionedSystem p = partition(build_gamma({0, 0, 0}, {2, 2, 2}));
    const double a = canonical_coeffs(p).a;
    const AdjugateCoeffs adj = adjugate_coeffs(p, a);
    CHECK(adj.a1p.isZero(0.0));
    CHECK(adj.a0p.isApprox(a * Matrix3::Identity(), 1e-15));
  }
  SUBCASE("elementwise form in field components and partitioned rates") {
    const FieldVector w{1.3, -0.6, 2.4};
    const RelaxationRates r{0.7, 1.9, 0.2};
    const PartitionedSystem p = partition(build_gamma(w, r));
    const Vector3 rp = r.partitioned();
    const AdjugateCoeffs adj = adjugate_coeffs(p, canonical_coeffs(p).a);
    Matrix3 a0_expected;
    a0_expected << w.omega1 * w.omega1 + rp(1) * rp(2),
        w.omega1 * w.omega2 - w.omega3 * rp(2),
        w.omega1 * w.omega3 + w.omega2 * rp(1),
        w.omega1 * w.omega2 + w.omega3 * rp(2),
        w.omega2 * w.omega2 + rp(0) * rp(2),
        w.omega2 * w.omega3 - w.omega1 * rp(0),
        w.omega1 * w.omega3 - w.omega2 * rp(1),
        w.omega2 * w.omega3 + w.omega1 * rp(0),
        w.omega3 * w.omega3 + rp(0) * rp(1);
    CHECK(max_abs_diff(adj.a0p, a0_expected) <=
          1e-13 * a0_expected.cwiseAbs().maxCoeff());
    CHECK(adj.a1p == -p.gamma_p);
  }
  SUBCASE("matches an independent cofactor adjugate at z = 0.7") {
    SplitMix64 rng(211);
    for (int i = 0; i < 200; ++i) {
      const SystemSample s = sample_system(rng, true, 1e-1, 1e1, 1e-1, 1e1);
      const PartitionedSystem p = partition(build_gamma(s.field, s.rates));
      const AdjugateCoeffs adj = adjugate_coeffs(p, canonical_coeffs(p).a);
      const double z = 0.7;
      const Matrix3 poly = adj.a0p + z * adj.a1p + z * z * Matrix3::Identity();
      const Matrix3 ref =
          adjugate_by_cofactors(z * Matrix3::Identity() + p.gamma_p);
      CHECK(max_abs_diff(poly, ref) <= 1e-10 * (ref.cwiseAbs().maxCoeff() + 1.0));
    }
  }
  SUBCASE("adjugate identity adj(A) * A = q(z) * Id") {
    SplitMix64 rng(213);
    for (int i = 0; i < 200; ++i) {
      const SystemSample s = sample_system(rng, true, 1e-1, 1e1, 1e-1, 1e1);
      const PartitionedSystem p = partition(build_gamma(s.field, s.rates));
      const CanonicalCoeffs cc = canonical_coeffs(p);
      const AdjugateCoeffs adj = adjugate_coeffs(p, cc.a);
      const double z = rng.uniform(-3.0, 3.0);
      const Matrix3 poly = adj.a0p + z * adj.a1p + z * z * Matrix3::Identity();
      const Matrix3 prod = poly * (z * Matrix3::Identity() + p.gamma_p);
      const double qz = z * z * z + cc.a * z + cc.b;
      CHECK(max_abs_diff(prod, qz * Matrix3::Identity()) <=
            1e-10 * (std::abs(qz) + std::pow(p.gamma_p.norm() + std::abs(z), 3)));
    }
  }
}

TEST_CASE("distinct branch golden cases") {
  SUBCASE("pure rotation about z times uniform decay") {
    const double wz = 4.0, R = 1.5, t = 0.8;
    const GammaMatrix g = build_gamma({0, 0, wz}, {R, R, R});
    const Propagator p = propagator(g, t);
    CHECK(p.branch == RootClass::Underdamped);
    Matrix3 rot;
    const double c = std::cos(wz * t), s = std::sin(wz * t);
    rot << c, -s, 0, s, c, 0, 0, 0, 1;
    CHECK(max_abs_diff(p.m, std::exp(-R * t) * rot) <= 1e-13);
  }
  SUBCASE("omega1^2 = 2 Rdelta^2: overdamped hyperbolic matrix") {
    const GammaMatrix g = golden_system(std::sqrt(2.0));
    for (double t : {0.1, 1.0, 2.5}) {
      const double e = std::exp(t);
      Matrix3 expected;
      expected << std::exp(-t), 0, 0,
          0, 2.0 - e, std::sqrt(2.0) * (1.0 - e),
          0, -std::sqrt(2.0) * (1.0 - e), 2.0 * e - 1.0;
      CHECK(max_abs_diff(gamma_p_exponential(g, t), expected) <= 1e-12);
    }
  }
  SUBCASE("omega1^2 = 3 Rdelta^2: a = 0 oscillatory matrix") {
    const GammaMatrix g = golden_system(std::sqrt(3.0));
    const double kappa = std::sqrt(3.0) / 2.0;
    for (double t : {0.1, 1.0, 2.5}) {
      const double e = std::exp(0.5 * t);
      Matrix3 expected;
      expected << std::exp(-t), 0, 0,
          0, -2.0 * e * std::sin(kappa * t - M_PI / 6.0), -2.0 * e * std::sin(kappa * t),
          0, 2.0 * e * std::sin(kappa * t), 2.0 * e * std::sin(kappa * t + M_PI / 6.0);
      CHECK(max_abs_diff(gamma_p_exponential(g, t), expected) <= 1e-12);
    }
  }
  SUBCASE("branch mismatch is rejected") {
    const PartitionedSystem p = partition(golden_system(0.0));  // pure relaxation
    const CubicSolution sol = solve_for(p);
    REQUIRE(sol.root_class == RootClass::CriticalDouble);
    CHECK_THROWS_AS(propagator_distinct(p, sol, 0.5), BlochError);
  }
}

TEST_CASE("double-root branch golden cases") {
  SUBCASE("pure relaxation diag(e^{-t}, e^{-t}, e^{2t})") {
    const GammaMatrix g = golden_system(0.0);
    for (double t : {0.1, 1.0}) {
      const Matrix3 got = gamma_p_exponential(g, t);
      Matrix3 expected = Matrix3::Zero();
      expected(0, 0) = std::exp(-t);
      expected(1, 1) = std::exp(-t);
      expected(2, 2) = std::exp(2.0 * t);
      CHECK(max_abs_diff(got, expected) <= 1e-12 * std::exp(2.0 * t));
      CHECK(propagator(g, t).branch == RootClass::CriticalDouble);
    }
  }
  SUBCASE("omega1 = 3/2 Rdelta: linear-in-t matrix") {
    const double w1 = 1.5;
    const GammaMatrix g = golden_system(w1);
    for (double t : {0.1, 1.0}) {
      const double e = std::exp(0.5 * t);
      Matrix3 expected;
      expected << std::exp(-t), 0, 0,
          0, e * (1.0 - w1 * t), -e * w1 * t,
          0, e * w1 * t, e * (1.0 + w1 * t);
      CHECK(max_abs_diff(gamma_p_exponential(g, t), expected) <= 1e-12);
    }
  }
  SUBCASE("t = 0 yields the exact identity") {
    const PartitionedSystem p = partition(golden_system(0.0));
    const Propagator prop = propagator_double(p, solve_for(p), 0.0);
    CHECK(prop.m == Matrix3::Identity());
  }
  SUBCASE("zero root routes to the triple branch") {
    const PartitionedSystem p = partition(golden_system(1.5));
    CubicSolution sol = solve_for(p);
    sol.z1 = 1e-12;
    CHECK_THROWS_AS(propagator_double(p, sol, 0.5), BlochError);
  }
}

TEST_CASE("triple branch") {
  SUBCASE("t = 0 and GammaP = 0") {
    const PartitionedSystem trivial = partition(build_gamma({0, 0, 0}, {2, 2, 2}));
    CHECK(propagator_triple(trivial, 0.0).m == Matrix3::Identity());
    const double t = 0.7;
    CHECK(max_abs_diff(propagator_triple(trivial, t).m,
                       std::exp(-2.0 * t) * Matrix3::Identity()) <= 1e-15);
  }
  SUBCASE("triple point matches the expm oracle to 1e-12") {
    // we^2 = 3 Rdelta^2, w3^2 = Rdelta^2 / 3, w2 = 0, Rdelta = 1.
    const double w3 = std::sqrt(1.0 / 3.0);
    const double w1 = std::sqrt(3.0 - 1.0 / 3.0);
    const GammaMatrix g = build_gamma({w1, 0, w3}, {3, 3, 0});
    const PartitionedSystem p = partition(g);
    for (double t : {0.1, 0.9, 2.2}) {
      const Matrix3 ref = expm_reference(-g.m * t);
      CHECK(max_abs_diff(propagator_triple(p, t).m, ref) <=
            1e-12 * ref.cwiseAbs().maxCoeff());
    }
  }
  SUBCASE("dispatcher reroutes rounding-level triple points") {
    const double w3 = std::sqrt(1.0 / 3.0);
    const double w1 = std::sqrt(3.0 - 1.0 / 3.0);
    const GammaMatrix g = build_gamma({w1, 0, w3}, {3, 3, 0});
    const Propagator prop = propagator(g, 1.1);
    CHECK(prop.branch == RootClass::CriticalTriple);
    const Matrix3 ref = expm_reference(-g.m * 1.1);
    CHECK(max_abs_diff(prop.m, ref) <= 1e-11 * ref.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("dispatcher basics") {
  SUBCASE("t = 0 short-circuits to the identity") {
    SplitMix64 rng(223);
    for (int i = 0; i < 20; ++i) {
      const SystemSample s = sample_system(rng, true);
      CHECK(propagator(build_gamma(s.field, s.rates), 0.0).m == Matrix3::Identity());
    }
  }
  SUBCASE("negative time is rejected") {
    CHECK_THROWS_AS(propagator(build_gamma({0, 0, 1}, {1, 1, 1}), -0.1), BlochError);
  }
  SUBCASE("Torrey on-resonance parameters use the z1 = -Rdelta branch") {
    const RelaxationRates r{4.0, 4.0, 1.0};  // Rdelta = 1
    const GammaMatrix g = build_gamma({6.0, 0, 0}, r);
    const Propagator p = propagator(g, 0.4);
    CHECK(p.branch == RootClass::Underdamped);
    CHECK(p.roots.z1 == doctest::Approx(-1.0).epsilon(1e-12));
    const Matrix3 ref = expm_reference(-g.m * 0.4);
    CHECK(max_abs_diff(p.m, ref) <= 1e-11 * ref.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("oracle equivalence over random systems") {
  SplitMix64 rng(227);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const SystemSample s = sample_system(rng);
    const GammaMatrix g = build_gamma(s.field, s.rates);
    for (int k = 0; k < 5; ++k) {
      const double t = rng.uniform(0.0, 5.0 / s.rates.r_bar());
      const Matrix3 ref = expm_reference(-g.m * t);
      const double err = max_abs_diff(propagator(g, t).m, ref) /
                         ref.cwiseAbs().maxCoeff();
      worst = std::max(worst, err);
    }
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("semigroup, determinant and generator properties") {
  SplitMix64 rng(229);
  for (int i = 0; i < 300; ++i) {
    const SystemSample s = sample_system(rng, true, 1e-1, 1e3, 1e-1, 1e4);
    const GammaMatrix g = build_gamma(s.field, s.rates);
    const double r_bar = s.rates.r_bar();
    const double t1 = rng.uniform(0.0, 2.0 / r_bar);
    const double t2 = rng.uniform(0.0, 2.0 / r_bar);

    const Matrix3 p1 = propagator(g, t1).m;
    const Matrix3 p2 = propagator(g, t2).m;
    const Matrix3 p12 = propagator(g, t1 + t2).m;
    CHECK(max_abs_diff(p1 * p2, p12) <= 1e-8 * p12.cwiseAbs().maxCoeff());

    const double det_expected = std::exp(-3.0 * r_bar * t1);
    CHECK(std::abs(p1.determinant() - det_expected) <= 1e-10 * det_expected);
  }

  // Central difference of P matches -Gamma P with second-order convergence.
  const GammaMatrix g = build_gamma({2.0, -1.0, 1.5}, {0.9, 1.4, 0.3});
  const double t = 0.6;
  const Matrix3 rhs = -g.m * propagator(g, t).m;
  auto diff_err = [&](double h) {
    const Matrix3 num = (propagator(g, t + h).m - propagator(g, t - h).m) / (2.0 * h);
    return (num - rhs).cwiseAbs().maxCoeff();
  };
  const double ratio = diff_err(2e-3) / diff_err(1e-3);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("ch_coefficients") {
  SUBCASE("identity expansion at t = 0") {
    const PartitionedSystem p = partition(build_gamma({1.0, 0.5, 2.0}, {1, 2, 3}));
    const auto c = ch_coefficients(solve_for(p), canonical_coeffs(p).a, 0.0);
    CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(c[1]) <= 1e-15);
    CHECK(std::abs(c[2]) <= 1e-15);
  }
  SUBCASE("triple branch gives (1, -t, t^2/2)") {
    const CubicSolution sol = solve_roots({0.0, 0.0}, 0.0);
    REQUIRE(sol.root_class == RootClass::CriticalTriple);
    const double t = 0.37;
    const auto c = ch_coefficients(sol, 0.0, t);
    CHECK(c[0] == 1.0);
    CHECK(c[1] == -t);
    CHECK(c[2] == 0.5 * t * t);
  }
  SUBCASE("contraction reproduces the propagator matrix") {
    SplitMix64 rng(233);
    for (int i = 0; i < 200; ++i) {
      const SystemSample s = sample_system(rng, true, 1e-1, 1e2, 1e-1, 1e2);
      const GammaMatrix g = build_gamma(s.field, s.rates);
      const PartitionedSystem p = partition(g);
      const CubicSolution sol = solve_for(p);
      if (sol.root_class == RootClass::CriticalDouble ||
          sol.root_class == RootClass::CriticalTriple) {
        continue;
      }
      const double t = rng.uniform(0.0, 2.0 / s.rates.r_bar());
      const auto c = ch_coefficients(sol, sol.a, t);
      const Matrix3 m =
          std::exp(-p.r_bar * t) *
          (c[0] * Matrix3::Identity() + c[1] * p.gamma_p +
           c[2] * (p.gamma_p * p.gamma_p));
      const Matrix3 ref = propagator_distinct(p, sol, t).m;
      CHECK(max_abs_diff(m, ref) <= 1e-12 * (ref.cwiseAbs().maxCoeff() + 1.0));
    }
  }
  SUBCASE("complex-arithmetic residue sum agrees with the real form") {
    SplitMix64 rng(239);
    int tested = 0;
    for (int i = 0; tested < 500 && i < 2000; ++i) {
      const SystemSample s = sample_system(rng, true, 1e-1, 1e2, 1e-1, 1e2);
      const PartitionedSystem p = partition(build_gamma(s.field, s.rates));
      const CubicSolution sol = solve_for(p);
      if (sol.root_class == RootClass::CriticalDouble ||
          sol.root_class == RootClass::CriticalTriple) {
        continue;
      }
      ++tested;
      const double t = rng.uniform(0.0, 2.0 / s.rates.r_bar());
      const auto c = ch_coefficients(sol, sol.a, t);

      // S_n = sum_i z_i^n e^{z_i t} / q'(z_i) with q'(z) = 3 z^2 + a.
      Complex sn[3] = {};
      for (const Complex& z : {Complex(sol.z1, 0.0), sol.z_plus, sol.z_minus}) {
        const Complex qp = 3.0 * z * z + sol.a;
        const Complex base = std::exp(z * t) / qp;
        sn[0] += base;
        sn[1] += z * base;
        sn[2] += z * z * base;
      }
      const Complex a0 = sol.a * sn[0] + sn[2];
      const Complex a1 = -sn[1];
      const Complex a2 = sn[0];
      const double scale =
          std::max({std::abs(c[0]), std::abs(c[1]), std::abs(c[2]), 1e-30});
      CHECK(std::abs(a0 - c[0]) <= 1e-11 * scale * 10.0);
      CHECK(std::abs(a1 - c[1]) <= 1e-11 * scale * 10.0);
      CHECK(std::abs(a2 - c[2]) <= 1e-11 * scale * 10.0);
    }
  }
}

TEST_CASE("limit continuity across degeneracies") {
  // Move omega1 across the on-resonance critical point omega1 = 3/2 Rdelta
  // and compare the distinct and double branches near gamma = 1.
  const RelaxationRates rates{4.0, 4.0, 1.0};  // Rdelta = 1, rBar = 3
  const double t = 1.0;

  auto gamma_of = [&](double w1) {
    const PartitionedSystem p = partition(build_gamma({w1, 0, 0}, rates));
    return canonical_coeffs(p).gamma_param();
  };
  auto locate = [&](double target) {
    double lo = 1.2, hi = 1.7;  // gamma increases with omega1 on this span
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (gamma_of(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };

  for (double target : {1.0 + 1e-8, 1.0 - 1e-8}) {
    const double w1 = locate(target);
    const PartitionedSystem p = partition(build_gamma({w1, 0, 0}, rates));
    const CanonicalCoeffs cc = canonical_coeffs(p);
    const CubicSolution distinct_sol = solve_roots(cc, p.r_bar, 1e-12);
    const CubicSolution double_sol = solve_roots(cc, p.r_bar, 1e-6);
    REQUIRE(distinct_sol.root_class != RootClass::CriticalDouble);
    REQUIRE(double_sol.root_class == RootClass::CriticalDouble);
    const Matrix3 md = propagator_distinct(p, distinct_sol, t).m;
    const Matrix3 m2 = propagator_double(p, double_sol, t).m;
    CHECK(max_abs_diff(md, m2) <= 1e-5);
  }

  // Triple limit: walk the upper boundary toward (8, 1); the double and
  // triple forms converge as z1 -> 0.
  const double rd = 1.0;
  for (double eps : {1e-5, 1e-6}) {
    const double lambda3 = 1.0 - eps;
    // At lambda3 = 1 - eps both boundaries are within O(eps^{3/2}) of 8.
    const double lambda12 = 8.0;
    const double w3 = std::sqrt(lambda3 * rd * rd / 3.0);
    const double w1 = std::sqrt(lambda12 * rd * rd / 3.0);
    const GammaMatrix g = build_gamma({w1, 0, w3}, {4, 4, 1});
    const PartitionedSystem p = partition(g);
    const Matrix3 m3 = propagator_triple(p, t).m;
    const Matrix3 ref = expm_reference(-g.m * t);
    CHECK(max_abs_diff(m3, ref) <= 1e-5 * ref.cwiseAbs().maxCoeff());
  }
}
