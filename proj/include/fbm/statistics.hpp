#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "fbm/fit.hpp"
#include "fbm/induced.hpp"
#include "fbm/measure.hpp"
#include "fbm/observable.hpp"
#include "fbm/sampler.hpp"

namespace fbm {

// empirical survivor function of a return-time combination on log-spaced
// thresholds, with a power-law fit and the predicted tail for comparison.
// Standard errors treat samples as independent, which understates the
// uncertainty of orbit-correlated draws by a bounded factor.
struct TailPoint {
  double t = 0, ccdf = 0, se = 0;
};
struct TailReport {
  std::vector<TailPoint> points;
  // exponent_fit is a free log-log fit; prefactor_fit is measured against
  // exponent_theory when one is supplied, against the free slope otherwise
  double exponent_fit = 0, prefactor_fit = 0, r_squared = 0;
  double exponent_theory = 0, prefactor_theory = 0;  // NaN outside the power regime
  long samples = 0;
};

// upper tail of a tau+ + b tau- under the home measure
TailReport tau_tail(const InducedMap& G, const UlamResult& hL, const UlamResult& hR,
                    long count, double a, double b, double t_lo, double t_hi, uint64_t seed);

// same fit applied to an already collected sample of values
TailReport value_tail(const std::vector<double>& vals, double t_lo, double t_hi,
                      double exponent_theory, double prefactor_theory);

// partial sums s(T) = sum_{t<T} of the empirical survivor = mean(min(tau,T))
struct SurvivorSums {
  double s_hundredth = 0, s_tenth = 0, s_full = 0;
  long t_cut = 0;
};
SurvivorSums survivor_partial_sums(const std::vector<TauSample>& ts, long t_cut);

// empirical mass of each return-component tail against the quadrature of
// the matching home density over the boundary interval
struct ComponentTailPoint {
  long t = 0;
  bool plus_side = true;  // tau+ against the left home, tau- against the right
  double empirical = 0, se = 0, quadrature = 0;
};
std::vector<ComponentTailPoint> component_tail_check(const InducedMap& G, const UlamResult& hL,
                                                      const UlamResult& hR,
                                                      const std::vector<long>& ts, long replicas,
                                                      uint64_t seed);

// autocovariance of two centered observables along stationary orbits, with
// replica-spread errors and a one-sided comparison against the predicted
// minimal decay rate
struct CorrelationPoint {
  long n = 0;
  double value = 0, se = 0;
};
struct CorrelationReport {
  std::vector<CorrelationPoint> points;
  double fitted_exponent = 0;
  double bound_exponent = 0;  // NaN in the exponential regime
  bool one_sided_pass = false;
  double mean_phi = 0, mean_psi = 0;
};
CorrelationReport correlation_decay(const MapModel& m, const PartitionTable& t,
                                    const UlamResult& hL, const UlamResult& hR,
                                    const Observable& phi, const Observable& psi, long n_max,
                                    long total_steps, uint64_t seed);

// time average of log|g'| along stationary orbits against the quadrature
// of the same integrand over the spread measure
struct LyapunovReport {
  double orbit_estimate = 0, orbit_se = 0;
  double quadrature_estimate = 0;
  double rel_diff = 0;
  double mass = 0;  // normalizing mass of the spread measure
};
LyapunovReport lyapunov_consistency(const MapModel& m, const PartitionTable& t,
                                    const UlamResult& hL, const UlamResult& hR, long total_steps,
                                    uint64_t seed, int cell_cap = 400);

// sum of an observable along one return orbit
double induced_observable(const InducedMap& G, const Observable& obs, double x);

// tails of the return-orbit sums and of their residual after removing the
// endpoint-value multiples of the return components
struct InducedTails {
  TailReport full, residual;
  double beta_phi = 0;
};
InducedTails induced_tail_check(const InducedMap& G, const UlamResult& hL, const UlamResult& hR,
                                const Observable& obs, long count, double t_lo, double t_hi,
                                uint64_t seed);

// Birkhoff sums over an ensemble of stationary starts, scaled by the rate
// the endpoint weight dictates, with the diagnostics each regime calls for
struct LimitDiagnostics {
  double beta_phi = 0;
  std::string regime;  // "gaussian" | "gaussian_logn" | "stable"
  double mean_quadrature = 0;
  double sigma_hat = 0;       // sd of the scaled sums
  double ks_normal = 0;       // KS to a fitted normal under the regime scaling
  double ks_sqrt_n = 0;       // anchored-variance comparison, beta_phi = 1/2
  double ks_sqrt_nlogn = 0;
  double stable_index = 0;    // Hill estimate under the stable scaling
  long n = 0, replicas = 0;
};
LimitDiagnostics limit_diagnostics(const MapModel& m, const PartitionTable& t,
                                   const UlamResult& hL, const UlamResult& hR,
                                   const Observable& obs, long n, long replicas, uint64_t seed);

}  // namespace fbm
