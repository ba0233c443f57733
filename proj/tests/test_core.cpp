#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fbm/map.hpp"
#include "fbm/partition.hpp"
#include "helpers.hpp"

using namespace fbm;

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(MapModel{MapParams{}}, DomainError);  // all-zero core params
  MapParams p = pstar();
  p.a1 = 0;
  CHECK_THROWS_AS(MapModel{p}, DomainError);
  p = pstar();
  p.b2 = -1;
  CHECK_THROWS_AS(MapModel{p}, DomainError);
  p = pstar();
  p.k1 = 1;  // linear near-zero piece needs slope above 1
  CHECK_THROWS_AS(MapModel{p}, DomainError);
  p = pstar();
  p.iota = 1.5;
  CHECK_THROWS_AS(MapModel{p}, DomainError);
  p = pstar();
  p.blend_width = 0;
  CHECK_THROWS_AS(MapModel{p}, DomainError);
  p = affine();
  p.xi_coeff1 = -0.1;
  CHECK_THROWS_AS(MapModel{p}, DomainError);
  CHECK_NOTHROW(MapModel{affine()});  // xi = 0 with unit slope excess is fine
}

TEST_CASE("regime classification") {
  RegimeReport r = classify(pstar());
  CHECK(r.beta1 == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(r.beta2 == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(r.beta == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(r.finite_acip);
  CHECK(r.mixing == "polynomial");
  CHECK(r.poly_rate == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  r = classify(affine());
  CHECK(r.beta == 0.0);
  CHECK(r.finite_acip);
  CHECK(r.mixing == "exponential");

  r = classify(beta(5.0 / 6.0));
  CHECK(r.beta == doctest::Approx(1.25).epsilon(1e-14));
  CHECK_FALSE(r.finite_acip);
  CHECK(r.mixing == "infinite");

  r = classify(beta(0.2));
  CHECK(r.beta == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(r.mixing == "polynomial");
}

TEST_CASE("closed-form pieces take their exact values") {
  MapParams p;
  p.ell1 = p.ell2 = 1.0;
  p.k1 = p.k2 = 2.0;
  p.a1 = p.a2 = 1.0;
  p.b1 = p.b2 = 1.0;
  MapModel m(p);
  // near -1: x + b1 (1+x)^2, far below the blend window
  CHECK(m.eval(-0.9) == doctest::Approx(-0.89).epsilon(1e-14));
  // right of 0: -1 + a2 x^2 inside the explicit region
  CHECK(m.eval(0.1) == doctest::Approx(-0.99).epsilon(1e-14));
  CHECK(m.deriv(0.1) == doctest::Approx(0.2).epsilon(1e-13));
  // mirrored near +1: x - b2 (1-x)^2
  CHECK(m.eval(0.9) == doctest::Approx(0.89).epsilon(1e-14));
  // left of 0: 1 - a1 |x|^2
  CHECK(m.eval(-0.1) == doctest::Approx(0.99).epsilon(1e-14));
}

TEST_CASE("affine parameters reproduce the doubling map exactly") {
  MapModel m(affine());
  CHECK_FALSE(m.iotaReduced());
  for (double x : {-0.9, -0.6, -0.4, -0.3, -0.1}) {
    CHECK(m.eval(x) == doctest::Approx(1 + 2 * x).epsilon(1e-14));
    CHECK(m.deriv(x) == doctest::Approx(2.0).epsilon(1e-12));
  }
  for (double x : {0.1, 0.3, 0.4, 0.6, 0.9}) {
    CHECK(m.eval(x) == doctest::Approx(-1 + 2 * x).epsilon(1e-14));
    CHECK(m.deriv(x) == doctest::Approx(2.0).epsilon(1e-12));
  }
  CHECK(m.zeroCross(Side::Left) == doctest::Approx(-0.5).epsilon(1e-13));
  CHECK(m.zeroCross(Side::Right) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("branches are monotone, onto, and fix the endpoints") {
  for (const MapParams& p : {pstar(), affine(), beta(0.2), beta(5.0 / 6.0)}) {
    MapModel m(p);
    CHECK(m.eval(-1.0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(m.eval(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m.eval(0.0, Side::Left) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m.eval(0.0, Side::Right) == doctest::Approx(-1.0).epsilon(1e-14));
    double prev = -1.0;
    for (int i = 1; i < 2000; ++i) {
      double x = -1.0 + i / 2000.0;
      double y = m.eval(x);
      CHECK(y > prev);
      prev = y;
    }
    prev = -1.0;
    for (int i = 1; i <= 2000; ++i) {
      double x = i / 2000.0;
      double y = m.eval(x);
      CHECK(y > prev);
      prev = y;
    }
  }
}

TEST_CASE("zero crossings agree with a bisection of the evaluator") {
  for (const MapParams& p : {pstar(), beta(0.2)}) {
    MapModel m(p);
    double lo = -1.0, hi = 0.0;
    for (int i = 0; i < 100; ++i) {
      double mid = 0.5 * (lo + hi);
      (m.eval(mid) < 0 ? lo : hi) = mid;
    }
    CHECK(m.zeroCross(Side::Left) == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-12));
    lo = 0.0;
    hi = 1.0;
    for (int i = 0; i < 100; ++i) {
      double mid = 0.5 * (lo + hi);
      (m.eval(mid) < 0 ? lo : hi) = mid;
    }
    CHECK(m.zeroCross(Side::Right) == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-12));
  }
}

TEST_CASE("branch inverses round-trip") {
  MapModel m(pstar());
  for (int i = 1; i < 40; ++i) {
    double x = -1.0 + i / 40.0;
    CHECK(m.invert(Side::Left, m.eval(x)) == doctest::Approx(x).epsilon(1e-11));
    CHECK(m.invert(Side::Right, m.eval(x + 1.0)) == doctest::Approx(x + 1.0).epsilon(1e-11));
  }
}

TEST_CASE("distance-coordinate steps match the evaluator and pull back") {
  MapModel m(pstar());
  for (double z : {1e-12, 1e-8, 1e-4, 0.05, 0.2}) {
    CHECK(m.stepDistMinus(z) == doctest::Approx(1.0 + m.eval(-1.0 + z)).epsilon(1e-12));
    CHECK(m.pullbackDistMinus(m.stepDistMinus(z)) == doctest::Approx(z).epsilon(1e-12));
    CHECK(m.stepDistPlus(z) == doctest::Approx(1.0 - m.eval(1.0 - z)).epsilon(1e-12));
    CHECK(m.pullbackDistPlus(m.stepDistPlus(z)) == doctest::Approx(z).epsilon(1e-12));
  }
  // derivative in distance coordinates agrees with a central difference
  double z = 0.01, h = 1e-6;
  double fd = (m.stepDistMinus(z + h) - m.stepDistMinus(z - h)) / (2 * h);
  CHECK(m.derivDistMinus(z) == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("iota shrinks when the explicit regions would collide") {
  MapParams p = affine();
  p.iota = 0.45;  // gap 1 - 3*iota would go negative
  MapModel m(p);
  CHECK(m.iotaReduced());
  CHECK(m.iota() < 0.45);
  CHECK(m.uMinusEnd() < -m.iota());
  CHECK(m.uPlusStart() > m.iota());
}

TEST_CASE("expansion certificate exists for the reference parameters") {
  MapModel m(pstar());
  CHECK(m.lambda() > 1.0);
  CHECK(m.nMinusCert() >= 0);
  CHECK(m.nPlusCert() >= 0);
}

TEST_CASE("boundary tables decay with the predicted exponents") {
  MapModel m(pstar());
  PartitionTable t = compute_boundaries(m, 400);
  CHECK(t.n_max == 400);
  CHECK_FALSE(t.truncated);
  // distances decrease strictly to 0
  for (int n = 1; n <= 400; ++n) {
    CHECK(t.zm(n) < t.zm(n - 1));
    CHECK(t.wp(n) < t.wp(n - 1));
    CHECK(t.ym(n) < t.ym(n - 1));
    CHECK(t.yp(n) < t.yp(n - 1));
  }
  // boundary recurrences: g maps level n to level n-1
  for (int n : {1, 5, 50, 300}) {
    CHECK(m.stepDistMinus(t.zm(n)) == doctest::Approx(t.zm(n - 1)).epsilon(1e-11));
    CHECK(m.stepDistPlus(t.wp(n)) == doctest::Approx(t.wp(n - 1)).epsilon(1e-11));
    // entry cells: the image of y_n lands on the opposite outer level n-1
    CHECK(1.0 - m.eval(t.yMinus(n)) == doctest::Approx(t.wp(n - 1)).epsilon(1e-11));
    CHECK(1.0 + m.eval(t.yPlus(n)) == doctest::Approx(t.zm(n - 1)).epsilon(1e-11));
  }
  CHECK(t.yMinus(0) == doctest::Approx(m.zeroCross(Side::Left)).epsilon(1e-13));
  CHECK(t.yPlus(0) == doctest::Approx(m.zeroCross(Side::Right)).epsilon(1e-13));
}

TEST_CASE("tail fits recover the frozen reference constants") {
  // 1 + x_n^- ~ C1 n^{-2} with C1 = (ell1 b1)^{-1/ell1} = 4 for the
  // reference parameters, and |interval_n| ~ C3 n^{-3} with C3 = 8;
  // exponents are reported as the signed log-log slope
  MapModel m(pstar());
  PartitionTable t = compute_boundaries(m, 20000);
  FitReport f = fit_asymptotics(m, t, SeriesKind::XMinusDist);
  CHECK(f.power_law);
  CHECK(f.exponent_theory == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(f.constant_theory == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(f.exponent_fit == doctest::Approx(-2.0).epsilon(0.02));
  CHECK(f.constant_fit == doctest::Approx(4.0).epsilon(0.08));
  f = fit_asymptotics(m, t, SeriesKind::DeltaMinus);
  CHECK(f.exponent_theory == doctest::Approx(-3.0).epsilon(1e-14));
  CHECK(f.constant_theory == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(f.exponent_fit == doctest::Approx(-3.0).epsilon(0.02));
  // entry-cell boundaries: y_n^+ ~ B2 n^{-4/3}, B2 = 2^{4/3}
  f = fit_asymptotics(m, t, SeriesKind::YPlusAbs);
  CHECK(f.exponent_theory == doctest::Approx(-4.0 / 3.0).epsilon(1e-14));
  CHECK(f.constant_theory == doctest::Approx(std::pow(2.0, 4.0 / 3.0)).epsilon(1e-12));
  CHECK(f.exponent_fit == doctest::Approx(-4.0 / 3.0).epsilon(0.02));
}

TEST_CASE("exponential-regime tables decay geometrically") {
  MapModel m(affine());
  PartitionTable t = compute_boundaries(m, 40);
  // doubling map: levels halve each step on both ends
  CHECK(t.zm(10) == doctest::Approx(0.5 * std::pow(2.0, -10.0)).epsilon(1e-12));
  CHECK(t.wp(10) == doctest::Approx(0.5 * std::pow(2.0, -10.0)).epsilon(1e-12));
  CHECK(t.yMinus(3) == doctest::Approx(-std::pow(2.0, -4.0)).epsilon(1e-12));
  CHECK(t.yPlus(3) == doctest::Approx(std::pow(2.0, -4.0)).epsilon(1e-12));
  FitReport f = fit_asymptotics(m, t, SeriesKind::XMinusDist);
  CHECK_FALSE(f.power_law);
  CHECK(f.rate_theory == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(f.rate_fit == doctest::Approx(std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("deep tables keep relative precision") {
  MapModel m(pstar());
  PartitionTable t = compute_boundaries(m, 100000);
  CHECK(t.zm(100000) > 0);
  CHECK(t.zm(100000) == doctest::Approx(4.0 * std::pow(100000.0, -2.0)).epsilon(0.01));
  CHECK(t.yp(100000) == doctest::Approx(std::pow(2.0, 4.0 / 3.0) * std::pow(100000.0, -4.0 / 3.0))
                            .epsilon(0.01));
}
