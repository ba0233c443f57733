#include "fbm/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fbm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// predicted upper-tail power law of a tau+ + b tau-: each positive weight
// activates the survivor law of its return component; the slowest decay
// wins and equal exponents add. Components in the exponential regime decay
// faster than any power and contribute nothing to the overlay.
void theory_tail(const MapModel& m, const UlamResult& hL, const UlamResult& hR, double a,
                 double b, double& expo, double& pref) {
  const MapParams& p = m.params();
  std::vector<std::pair<double, double>> terms;
  if (a > 0 && p.ell2 > 0) {
    double beta2 = p.k1 * p.ell2;
    double B1 = std::pow(p.a1, -1.0 / p.k1) * std::pow(p.ell2 * p.b2, -1.0 / beta2);
    terms.push_back({1.0 / beta2, hL.density_at_zero * B1 * std::pow(a, 1.0 / beta2)});
  }
  if (b > 0 && p.ell1 > 0) {
    double beta1 = p.k2 * p.ell1;
    double B2 = std::pow(p.a2, -1.0 / p.k2) * std::pow(p.ell1 * p.b1, -1.0 / beta1);
    terms.push_back({1.0 / beta1, hR.density_at_zero * B2 * std::pow(b, 1.0 / beta1)});
  }
  if (terms.empty()) {
    expo = kNaN;
    pref = kNaN;
    return;
  }
  expo = terms[0].first;
  for (const auto& t : terms) expo = std::min(expo, t.first);
  pref = 0;
  for (const auto& t : terms)
    if (t.first < expo + 1e-12) pref += t.second;
}

// one return orbit, accumulating the observable along the way
struct OrbitSum {
  double phi_sum = 0;
  long tau_plus = 0, tau_minus = 0;
  double x_return = 0;
};

OrbitSum return_orbit_sum(const MapModel& m, const Interval& h, const Observable& obs,
                          double x) {
  OrbitSum r;
  double y = x;
  for (long k = 0; k < 100000000L; ++k) {
    r.phi_sum += obs(y);
    if (y == 0.0)  // possible once the mantissa is spent on exactly affine pieces
      throw ConvergenceFailure("orbit landed on the branch point between the homes");
    double ynext = m.eval(y);
    if (ynext == y)
      throw ConvergenceFailure("orbit stalled at machine precision near an endpoint");
    y = ynext;
    if (y > 0)
      ++r.tau_plus;
    else
      ++r.tau_minus;
    if (y > h.lo && y < h.hi) {
      r.x_return = y;
      return r;
    }
  }
  throw BudgetExceeded("return orbit exceeded the iteration cap");
}

double sample_sd(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0;
  double s = 0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / (v.size() - 1));
}

double sample_mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0 : s / v.size();
}

// raw orbit step; exactly affine pieces can land on the branch point once the
// mantissa is spent, so pick the left limit there and keep going
double orbit_next(const MapModel& m, double x) {
  double y = x == 0.0 ? m.eval(x, Side::Left) : m.eval(x);
  return std::clamp(y, -1.0, 1.0);
}

}  // namespace

TailReport value_tail(const std::vector<double>& vals, double t_lo, double t_hi,
                      double exponent_theory, double prefactor_theory) {
  if (vals.size() < 100) throw InsufficientData("tail fit needs a larger sample");
  if (!(t_hi > t_lo) || !(t_lo > 0)) throw DomainError("tail thresholds must be positive");
  TailReport r;
  r.samples = static_cast<long>(vals.size());
  r.exponent_theory = exponent_theory;
  r.prefactor_theory = prefactor_theory;

  std::vector<double> s(vals);
  std::sort(s.begin(), s.end());
  const double N = static_cast<double>(s.size());
  const int K = 25;
  std::vector<double> xs, ys;
  for (int j = 0; j < K; ++j) {
    double t = t_lo * std::pow(t_hi / t_lo, static_cast<double>(j) / (K - 1));
    long cnt = s.end() - std::upper_bound(s.begin(), s.end(), t);
    double p = cnt / N;
    TailPoint tp{t, p, std::sqrt(std::max(p * (1.0 - p), 0.0) / N)};
    r.points.push_back(tp);
    if (cnt >= 25) {
      xs.push_back(std::log(t));
      ys.push_back(std::log(p));
    }
  }
  if (xs.size() >= 4) {
    LinFit f = linear_fit(xs, ys);
    r.exponent_fit = -f.slope;
    r.r_squared = f.r_squared;
    if (std::isfinite(exponent_theory)) {
      // prefactor measured against the supplied exponent; a free intercept
      // would absorb any slope misfit as a spurious level shift
      double acc = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) acc += ys[i] + exponent_theory * xs[i];
      r.prefactor_fit = std::exp(acc / static_cast<double>(xs.size()));
    } else {
      r.prefactor_fit = std::exp(f.intercept);
    }
  } else {
    r.exponent_fit = kNaN;
    r.prefactor_fit = kNaN;
    r.r_squared = 0;
  }
  return r;
}

TailReport tau_tail(const InducedMap& G, const UlamResult& hL, const UlamResult& hR, long count,
                    double a, double b, double t_lo, double t_hi, uint64_t seed) {
  std::vector<TauSample> ts = sample_returns(G, Side::Left, count, seed);
  std::vector<double> vals(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i)
    vals[i] = a * ts[i].tau_plus + b * ts[i].tau_minus;
  double eth, pth;
  theory_tail(G.model(), hL, hR, a, b, eth, pth);
  return value_tail(vals, t_lo, t_hi, eth, pth);
}

SurvivorSums survivor_partial_sums(const std::vector<TauSample>& ts, long t_cut) {
  if (ts.empty()) throw InsufficientData("no return samples");
  SurvivorSums r;
  r.t_cut = t_cut;
  double sh = 0, st = 0, sf = 0;
  for (const auto& s : ts) {
    double tau = static_cast<double>(s.tau());
    sh += std::min(tau, static_cast<double>(t_cut / 100));
    st += std::min(tau, static_cast<double>(t_cut / 10));
    sf += std::min(tau, static_cast<double>(t_cut));
  }
  r.s_hundredth = sh / ts.size();
  r.s_tenth = st / ts.size();
  r.s_full = sf / ts.size();
  return r;
}

std::vector<ComponentTailPoint> component_tail_check(const InducedMap& G, const UlamResult& hL,
                                                      const UlamResult& hR,
                                                      const std::vector<long>& ts, long replicas,
                                                      uint64_t seed) {
  StationarySampler sampler(G.model(), hL);
  std::vector<long> cntP(ts.size(), 0), cntM(ts.size(), 0);
  long censored = 0;
  for (long i = 0; i < replicas; ++i) {
    Rng rng(seed, static_cast<uint64_t>(i) + 1);
    double x = sampler.drawHome(rng);
    long mP, mM;
    try {
      CellIndex c = G.locate_cell(x);
      mP = c.m;
      mM = c.n;
    } catch (const IndexOutOfRange&) {
      // deeper than the table: the climb count exceeds every threshold and
      // the cross component is unknown, so it is dropped from that side
      mP = std::numeric_limits<long>::max();
      mM = -1;
      ++censored;
    }
    for (std::size_t j = 0; j < ts.size(); ++j) {
      if (mP > ts[j]) ++cntP[j];
      if (mM > ts[j]) ++cntM[j];
    }
  }
  std::vector<ComponentTailPoint> out;
  const PartitionTable& t = G.table();
  double RP = static_cast<double>(replicas);
  double RM = static_cast<double>(replicas - censored);
  for (std::size_t j = 0; j < ts.size(); ++j) {
    double pP = cntP[j] / RP;
    double pM = cntM[j] / RM;
    out.push_back({ts[j], true, pP, std::sqrt(std::max(pP * (1 - pP), 0.0) / RP),
                   tail_tau_plus(t, hL, ts[j])});
    out.push_back({ts[j], false, pM, std::sqrt(std::max(pM * (1 - pM), 0.0) / RM),
                   tail_tau_minus(t, hR, ts[j])});
  }
  return out;
}

CorrelationReport correlation_decay(const MapModel& m, const PartitionTable& t,
                                    const UlamResult& hL, const UlamResult& hR,
                                    const Observable& phi, const Observable& psi, long n_max,
                                    long total_steps, uint64_t seed) {
  MassReport mass = acip_mass(m, t, hL, hR);
  if (!mass.finite) throw DomainError("correlation decay needs a finite invariant measure");
  auto integ = [&](const Observable& f) {
    return invariant_integral(m, t, hL, hR, [&](double x, double) { return f(x); },
                              f.atMinus1(), f.atPlus1())
               .total() /
           mass.e_tau;
  };
  CorrelationReport r;
  r.mean_phi = integ(phi);
  r.mean_psi = integ(psi);

  // log-spaced lags plus the variance at lag zero
  std::vector<long> lags{0};
  for (int j = 0; j < 18; ++j) {
    long n = std::lround(std::pow(static_cast<double>(n_max), j / 17.0));
    if (n != lags.back()) lags.push_back(n);
  }

  const int R = 8;
  const long L = total_steps / R;
  if (L <= 2 * n_max) throw InsufficientData("orbit budget too small for the requested lags");
  StationarySampler sampler(m, hL);
  std::vector<std::vector<double>> C(lags.size());
  std::vector<double> fp(L), fq(L);
  for (int rep = 0; rep < R; ++rep) {
    Rng rng(seed, static_cast<uint64_t>(rep) + 1);
    double x = sampler.draw(rng);
    for (long k = 0; k < L; ++k) {
      fp[k] = phi(x) - r.mean_phi;
      fq[k] = psi(x) - r.mean_psi;
      x = orbit_next(m, x);
    }
    for (std::size_t j = 0; j < lags.size(); ++j) {
      long n = lags[j];
      long W = L - n;
      double spq = 0, sp = 0, sq = 0;
      for (long k = 0; k < W; ++k) {
        spq += fp[k] * fq[k + n];
        sp += fp[k];
        sq += fq[k + n];
      }
      C[j].push_back(spq / W - (sp / W) * (sq / W));
    }
  }
  for (std::size_t j = 0; j < lags.size(); ++j) {
    double mean = sample_mean(C[j]);
    r.points.push_back({lags[j], mean, sample_sd(C[j], mean) / std::sqrt(double(R))});
  }

  const RegimeReport& reg = m.regime();
  r.bound_exponent = reg.mixing == "polynomial" ? reg.poly_rate : kNaN;

  // fit the resolved late-lag points; falling below noise also passes
  std::vector<double> xs, ys;
  bool late_noise = true;
  for (const auto& pt : r.points) {
    if (pt.n < std::max<long>(2, n_max / 10)) continue;
    if (std::abs(pt.value) > 2 * pt.se) {
      xs.push_back(std::log(static_cast<double>(pt.n)));
      ys.push_back(std::log(std::abs(pt.value)));
      late_noise = false;
    }
  }
  if (xs.size() >= 4) {
    LinFit f = linear_fit(xs, ys);
    r.fitted_exponent = -f.slope;
  } else {
    r.fitted_exponent = kNaN;
  }
  if (std::isnan(r.bound_exponent))
    r.one_sided_pass = late_noise || r.fitted_exponent > 1.0;
  else
    r.one_sided_pass = late_noise || (!std::isnan(r.fitted_exponent) &&
                                      r.fitted_exponent >= 0.8 * r.bound_exponent);
  return r;
}

LyapunovReport lyapunov_consistency(const MapModel& m, const PartitionTable& t,
                                    const UlamResult& hL, const UlamResult& hR, long total_steps,
                                    uint64_t seed, int cell_cap) {
  MassReport mass = acip_mass(m, t, hL, hR);
  if (!mass.finite) throw DomainError("normalized exponent needs a finite invariant measure");
  LyapunovReport r;
  r.mass = mass.e_tau;

  // out-of-cap excursions still cross the middle once, which the endpoint
  // limits cannot see; a larger cap shrinks that truncation bias
  SpreadIntegral I = invariant_integral(
      m, t, hL, hR, [](double, double d) { return std::log(d); },
      std::log(m.derivDistMinus(0.0)), std::log(m.derivDistPlus(0.0)), cell_cap);
  r.quadrature_estimate = I.total() / mass.e_tau;

  const int R = 8;
  const long L = total_steps / R;
  StationarySampler sampler(m, hL);
  std::vector<double> means;
  for (int rep = 0; rep < R; ++rep) {
    Rng rng(seed, static_cast<uint64_t>(rep) + 1);
    double x = sampler.draw(rng);
    double acc = 0;
    for (long k = 0; k < L; ++k) {
      acc += std::log(x == 0.0 ? m.deriv(x, Side::Left) : m.deriv(x));
      x = orbit_next(m, x);
    }
    means.push_back(acc / L);
  }
  r.orbit_estimate = sample_mean(means);
  r.orbit_se = sample_sd(means, r.orbit_estimate) / std::sqrt(double(R));
  r.rel_diff = std::abs(r.orbit_estimate - r.quadrature_estimate) /
               std::max(std::abs(r.quadrature_estimate), 1e-12);
  return r;
}

double induced_observable(const InducedMap& G, const Observable& obs, double x) {
  Interval h = G.home(x < 0 ? Side::Left : Side::Right);
  if (!(x > h.lo) || !(x < h.hi)) throw DomainError("start point outside the home interval");
  return return_orbit_sum(G.model(), h, obs, x).phi_sum;
}

InducedTails induced_tail_check(const InducedMap& G, const UlamResult& hL, const UlamResult& hR,
                                const Observable& obs, long count, double t_lo, double t_hi,
                                uint64_t seed) {
  InducedTails r;
  r.beta_phi = beta_phi(obs, G.model().regime());
  const double a = obs.atPlus1(), b = obs.atMinus1();

  Interval h = G.home(Side::Left);
  Rng rng(seed, 0);
  auto fresh = [&] { return h.lo + (h.hi - h.lo) * (0.25 + 0.5 * rng.uniform()); };
  double x = fresh();
  std::vector<double> full, res;
  full.reserve(count);
  res.reserve(count);
  const long burn = 100;
  // restart chains that die on the branch point, capped so a systematic failure
  // still surfaces
  const long max_restarts = count / 4 + 16;
  long restarts = 0;
  long warm = burn;
  long done = 0;
  while (done < count) {
    try {
      OrbitSum o = return_orbit_sum(G.model(), h, obs, x);
      x = o.x_return;
      if (warm > 0) {
        --warm;
      } else {
        full.push_back(o.phi_sum);
        res.push_back(o.phi_sum - a * o.tau_plus - b * o.tau_minus);
        ++done;
      }
    } catch (const ConvergenceFailure&) {
      if (++restarts > max_restarts) throw;
      x = fresh();
      warm = std::max<long>(warm, 4);
    }
  }
  double eth, pth;
  theory_tail(G.model(), hL, hR, a, b, eth, pth);
  r.full = value_tail(full, t_lo, t_hi, eth, pth);
  r.residual = value_tail(res, t_lo, t_hi, kNaN, kNaN);
  return r;
}

LimitDiagnostics limit_diagnostics(const MapModel& m, const PartitionTable& t,
                                   const UlamResult& hL, const UlamResult& hR,
                                   const Observable& obs, long n, long replicas, uint64_t seed) {
  LimitDiagnostics r;
  r.n = n;
  r.replicas = replicas;
  const RegimeReport& reg = m.regime();
  r.beta_phi = beta_phi(obs, reg);

  MassReport mass = acip_mass(m, t, hL, hR);
  if (!mass.finite) throw DomainError("distributional limits need a finite invariant measure");
  r.mean_quadrature = invariant_integral(m, t, hL, hR,
                                         [&](double x, double) { return obs(x); },
                                         obs.atMinus1(), obs.atPlus1())
                          .total() /
                      mass.e_tau;

  StationarySampler sampler(m, hL);
  const long n0 = std::max<long>(100, n / 100);
  std::vector<double> S0(replicas), S1(replicas);
  for (long rep = 0; rep < replicas; ++rep) {
    Rng rng(seed, static_cast<uint64_t>(rep) + 1);
    double x = sampler.draw(rng);
    double acc = 0;
    for (long k = 0; k < n; ++k) {
      acc += obs(x) - r.mean_quadrature;
      if (k + 1 == n0) S0[rep] = acc;
      x = orbit_next(m, x);
    }
    S1[rep] = acc;
  }

  r.ks_normal = kNaN;
  r.ks_sqrt_n = kNaN;
  r.ks_sqrt_nlogn = kNaN;
  r.stable_index = kNaN;
  auto scaled = [&](const std::vector<double>& S, double scale) {
    std::vector<double> v(S.size());
    for (std::size_t i = 0; i < S.size(); ++i) v[i] = S[i] / scale;
    return v;
  };
  if (r.beta_phi < 0.5 - 1e-9) {
    r.regime = "gaussian";
    std::vector<double> v = scaled(S1, std::sqrt(double(n)));
    double mu = sample_mean(v);
    r.sigma_hat = sample_sd(v, mu);
    r.ks_normal = ks_to_normal(v, mu, r.sigma_hat);
  } else if (r.beta_phi <= 0.5 + 1e-9) {
    r.regime = "gaussian_logn";
    // variances anchored at an early checkpoint decide the normalization:
    // only the correct one transports to the full horizon
    std::vector<double> a0 = scaled(S0, std::sqrt(double(n0)));
    std::vector<double> b0 = scaled(S0, std::sqrt(double(n0) * std::log(double(n0))));
    double sdA = sample_sd(a0, sample_mean(a0));
    double sdB = sample_sd(b0, sample_mean(b0));
    std::vector<double> vA = scaled(S1, std::sqrt(double(n)));
    std::vector<double> vB = scaled(S1, std::sqrt(double(n) * std::log(double(n))));
    r.ks_sqrt_n = ks_to_normal(vA, sample_mean(vA), sdA);
    r.ks_sqrt_nlogn = ks_to_normal(vB, sample_mean(vB), sdB);
    r.ks_normal = r.ks_sqrt_nlogn;
    r.sigma_hat = sdB;
  } else {
    r.regime = "stable";
    std::vector<double> v = scaled(S1, std::pow(double(n), r.beta_phi));
    double mu = sample_mean(v);
    r.sigma_hat = sample_sd(v, mu);
    bool upper = obs.atPlus1() > 0 || obs.atMinus1() > 0;
    r.stable_index = hill_tail_index(v, 0.02, upper);
  }
  return r;
}

}  // namespace fbm
