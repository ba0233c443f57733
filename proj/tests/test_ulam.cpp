#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fbm/ulam.hpp"
#include "helpers.hpp"

using namespace fbm;

TEST_CASE("doubling map: return density is uniform at twice the inverse width") {
  // every branch piece has slope 2, so the invariant density of the map is
  // Lebesgue/2 and its restriction to either home interval has density 2
  MapModel m(affine());
  PartitionTable t = compute_boundaries(m, 300);
  UlamOptions o;
  o.bins = 128;
  o.cell_cap = 120;
  for (Side side : {Side::Left, Side::Right}) {
    UlamResult u = ulam_density(m, t, side, o);
    CHECK(u.escape < 1e-9);
    CHECK(u.residual < 1e-10);
    CHECK(std::abs(u.mass.sum() - 1.0) < 1e-12);
    for (int i = 0; i < u.bins; ++i)
      CHECK(u.density(i) == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(u.density_at_zero == doctest::Approx(2.0).epsilon(1e-4));
  }
}

TEST_CASE("reference parameters: density is positive and mixes to a fixed point") {
  MapModel m(pstar());
  PartitionTable t = compute_boundaries(m, 2000);
  UlamOptions o;
  o.bins = 256;
  o.cell_cap = 200;
  UlamResult u = ulam_density(m, t, Side::Left, o);
  CHECK(u.side == Side::Left);
  CHECK(u.lo == doctest::Approx(m.zeroCross(Side::Left)).epsilon(1e-12));
  CHECK(u.hi == 0.0);
  CHECK(u.escape < 0.01);
  CHECK(u.residual < 1e-10);
  for (int i = 0; i < u.bins; ++i) CHECK(u.density(i) > 0);
  CHECK(u.density_at_zero > 0);
}

TEST_CASE("binned endpoint value stabilizes as bins double") {
  MapModel m(pstar());
  PartitionTable t = compute_boundaries(m, 2000);
  UlamOptions o;
  o.cell_cap = 200;
  o.bins = 256;
  double d256 = ulam_density(m, t, Side::Left, o).density_at_zero;
  o.bins = 512;
  double d512 = ulam_density(m, t, Side::Left, o).density_at_zero;
  CHECK(d512 == doctest::Approx(d256).epsilon(0.02));
}

TEST_CASE("undersized cell truncation is rejected, not papered over") {
  MapModel m(pstar());
  PartitionTable t = compute_boundaries(m, 2000);
  UlamOptions o;
  o.bins = 64;
  o.cell_cap = 30;
  o.escape_tol = 0.005;
  CHECK_THROWS_AS(ulam_density(m, t, Side::Left, o), TruncationTooSmall);
}

TEST_CASE("density reads interpolate the bins") {
  MapModel m(pstar());
  PartitionTable t = compute_boundaries(m, 2000);
  UlamOptions o;
  o.bins = 256;
  o.cell_cap = 200;
  UlamResult u = ulam_density(m, t, Side::Left, o);
  for (int i : {3, 64, 200}) {
    CHECK(density_at(u, u.center(i)) == doctest::Approx(u.density(i)).epsilon(1e-12));
    double mid = 0.5 * (u.center(i) + u.center(i + 1));
    double lo = std::min(u.density(i), u.density(i + 1));
    double hi = std::max(u.density(i), u.density(i + 1));
    double v = density_at(u, mid);
    CHECK(v >= lo - 1e-12);
    CHECK(v <= hi + 1e-12);
  }
  CHECK_THROWS_AS(density_at(u, 0.5), DomainError);
}
