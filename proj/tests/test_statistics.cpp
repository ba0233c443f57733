#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fbm/statistics.hpp"
#include "helpers.hpp"

using namespace fbm;

namespace {

struct Setup {
  Setup(const fbm::MapParams& p, int depth, int bins, int cap)
      : m(p), t(compute_boundaries(m, depth)), G(m, t) {
    UlamOptions o;
    o.bins = bins;
    o.cell_cap = cap;
    hL = ulam_density(m, t, Side::Left, o);
    hR = ulam_density(m, t, Side::Right, o);
  }
  MapModel m;
  PartitionTable t;
  InducedMap G;
  UlamResult hL, hR;
};

}  // namespace

TEST_CASE("synthetic power law is recovered to a tenth of a percent") {
  // deterministic quantile grid of a survivor t^{-4/3}, t >= 1
  const long N = 4000000;
  std::vector<double> vals(N);
  for (long i = 0; i < N; ++i) {
    double u = (i + 0.5) / static_cast<double>(N);
    vals[i] = std::pow(u, -0.75);
  }
  TailReport r = value_tail(vals, 2.0, 100.0, 4.0 / 3.0, 1.0);
  CHECK(r.exponent_fit == doctest::Approx(4.0 / 3.0).epsilon(0.001));
  CHECK(r.prefactor_fit == doctest::Approx(1.0).epsilon(0.005));
  CHECK(r.r_squared > 0.99999);
}

TEST_CASE("tail fit needs data in the window") {
  std::vector<double> vals(200, 1.0);
  TailReport r = value_tail(vals, 10.0, 100.0, std::nan(""), std::nan(""));
  CHECK(std::isnan(r.exponent_fit));
  CHECK_THROWS_AS(value_tail(std::vector<double>(10, 1.0), 2.0, 10.0, 0.0, 0.0),
                  InsufficientData);
}

TEST_CASE("predicted tail exponent and prefactor wire the endpoint densities") {
  Setup s(pstar(), 2000, 256, 150);
  TailReport r = tau_tail(s.G, s.hL, s.hR, 2000, 1.0, 1.0, 10.0, 100.0, 3);
  CHECK(r.samples == 2000);
  CHECK(r.exponent_theory == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  // both components share beta = 3/4, so the constants add:
  // (h-(0) + h+(0)) * (ell b)^{-1/beta} with (1/2)^{-4/3} = 2^{4/3}
  double expect = (s.hL.density_at_zero + s.hR.density_at_zero) * 2.5198420997897464;
  CHECK(r.prefactor_theory == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("endpoint weights pick the right tail index") {
  RegimeReport reg = classify(pstar());
  CHECK(beta_phi(vanishing_cubic(), reg) == 0.0);
  CHECK(beta_phi(affine_tilt(), reg) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(beta_phi(left_step(), reg) == doctest::Approx(0.75).epsilon(1e-12));

  MapParams ns = beta(1.0 / 3.0);
  RegimeReport rns = classify(ns);
  CHECK(beta_phi(left_step(), rns) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(beta_phi(vanishing_cubic(), rns) == 0.0);
}

TEST_CASE("regularity margins separate smooth from rough observables") {
  MapParams p = pstar();
  RegimeReport reg = classify(p);
  HolderCheck smooth = holder_conditions(vanishing_cubic(), p, reg);
  CHECK(smooth.basic);
  CHECK(smooth.refined);
  Observable rough("rough", {{1.0, 0.1}}, {{1.0, 0.1}}, 0.1, 0.1);
  HolderCheck hc = holder_conditions(rough, p, reg);
  CHECK_FALSE(hc.basic);
  CHECK_FALSE(hc.refined);
}

TEST_CASE("autocovariance of a constant vanishes to roundoff") {
  Setup s(affine(), 300, 128, 120);
  Observable ones = step_pair(1.0, 1.0);
  CorrelationReport r = correlation_decay(s.m, s.t, s.hL, s.hR, ones, ones, 8, 8000, 17);
  for (const auto& pt : r.points) CHECK(std::abs(pt.value) < 1e-12);
  CHECK(r.one_sided_pass);
}

TEST_CASE("doubling map: orbit and quadrature exponents are both log 2") {
  Setup s(affine(), 300, 128, 120);
  LyapunovReport r = lyapunov_consistency(s.m, s.t, s.hL, s.hR, 200000, 29);
  CHECK(r.quadrature_estimate == doctest::Approx(std::log(2.0)).epsilon(1e-6));
  CHECK(r.orbit_estimate == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(r.rel_diff < 1e-6);
}

TEST_CASE("component tail masses match the home-density quadrature") {
  Setup s(affine(), 300, 128, 120);
  auto pts = component_tail_check(s.G, s.hL, s.hR, {1, 3}, 4000, 7);
  CHECK(pts.size() == 4);
  for (const auto& p : pts) {
    CHECK(p.quadrature == doctest::Approx(std::pow(2.0, -static_cast<double>(p.t))).epsilon(0.01));
    CHECK(std::abs(p.empirical - p.quadrature) < 4.0 * p.se);
  }
}

TEST_CASE("seeded draws repeat exactly") {
  Setup s(pstar(), 2000, 128, 150);
  auto a = sample_returns(s.G, Side::Left, 500, 99);
  auto b = sample_returns(s.G, Side::Left, 500, 99);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].tau_plus == b[i].tau_plus);
    CHECK(a[i].tau_minus == b[i].tau_minus);
  }
}

TEST_CASE("return-orbit sums split into components plus a bounded residual") {
  Setup s(pstar(), 2000, 256, 150);
  InducedTails r = induced_tail_check(s.G, s.hL, s.hR, affine_tilt(), 3000, 10.0, 100.0, 5);
  CHECK(r.beta_phi == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(r.full.samples == 3000);
  CHECK(r.full.exponent_theory == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(std::isnan(r.residual.exponent_theory));
}

TEST_CASE("ensemble sums of a balanced observable look normal when mixing is fast") {
  // not the doubling map itself: exactly affine branches shift mantissa bits
  // out and every double orbit collapses onto a dyadic fixed point within
  // ~53 steps; a nonzero quadratic term keeps the mixing exponential while
  // rounding refreshes the low bits
  MapParams p = affine();
  p.xi_coeff1 = p.xi_coeff2 = 0.05;
  Setup s(p, 300, 128, 120);
  LimitDiagnostics d = limit_diagnostics(s.m, s.t, s.hL, s.hR, vanishing_cubic(), 400, 400, 11);
  CHECK(d.regime == "gaussian");
  CHECK(d.beta_phi == 0.0);
  CHECK(std::abs(d.mean_quadrature) < 1e-3);
  CHECK(d.sigma_hat > 0);
  CHECK(d.ks_normal < 0.1);
}

TEST_CASE("normal distance statistic reacts to shape") {
  // triangular-ish sample from summed uniforms is close to normal,
  // a uniform sample is not
  std::vector<double> near, flat;
  uint64_t s = 1;
  auto next = [&] {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(s >> 11) / 9007199254740992.0;
  };
  for (int i = 0; i < 4000; ++i) {
    double acc = 0;
    for (int k = 0; k < 12; ++k) acc += next();
    near.push_back(acc - 6.0);
    flat.push_back(next());
  }
  CHECK(ks_to_normal(near, 0.0, 1.0) < 0.03);
  CHECK(ks_to_normal(flat, 0.5, std::sqrt(1.0 / 12.0)) > 0.05);
}

TEST_CASE("tail index estimator recovers a pareto grid") {
  std::vector<double> vals;
  const long N = 200000;
  for (long i = 0; i < N; ++i) vals.push_back(std::pow((i + 0.5) / N, -0.5));
  CHECK(hill_tail_index(vals, 0.02, true) == doctest::Approx(2.0).epsilon(0.05));
}
