#include "fbm/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fbm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// survivor-sequence decay on one side: power t^{-s} or geometric r^t
struct TailLaw {
  bool power = true;
  double s = 0, r = 0;
};

// mu-hat(tau+ > t) tracks |y_t^-|, governed by the +1 side parameters
TailLaw plus_tail_law(const MapParams& p) {
  TailLaw L;
  if (p.ell2 > 0) {
    L.power = true;
    L.s = 1.0 / (p.k1 * p.ell2);
  } else {
    L.power = false;
    L.r = std::pow(1.0 + p.b2, -1.0 / p.k1);
  }
  return L;
}

// mu-hat(tau- > t) tracks y_t^+, governed by the -1 side parameters
TailLaw minus_tail_law(const MapParams& p) {
  TailLaw L;
  if (p.ell1 > 0) {
    L.power = true;
    L.s = 1.0 / (p.k2 * p.ell1);
  } else {
    L.power = false;
    L.r = std::pow(1.0 + p.b1, -1.0 / p.k2);
  }
  return L;
}

// sum over t > T of the law anchored at a_T; infinite when it diverges
double completion_beyond(const TailLaw& L, double a_T, double T) {
  if (!(a_T > 0)) return 0.0;
  if (!L.power) return a_T * L.r / (1.0 - L.r);
  if (L.s <= 1.0) return kInf;
  return a_T * std::pow(T, L.s) * std::pow(T + 0.5, 1.0 - L.s) / (L.s - 1.0);
}

}  // namespace

HomeIntegral::HomeIntegral(const UlamResult& u) : u_(u), below_(u.bins + 1) {
  below_(0) = 0.0;
  for (int i = 0; i < u.bins; ++i) below_(i + 1) = below_(i) + u.mass(i);
}

double HomeIntegral::toZero(double a) const {
  double x = std::clamp(a, u_.lo, u_.hi);
  double f = (x - u_.lo) / u_.bin_width();
  int i = std::clamp(static_cast<int>(std::floor(f)), 0, u_.bins - 1);
  double frac = std::clamp(f - i, 0.0, 1.0);
  double mass_below = below_(i) + u_.mass(i) * frac;
  // left home: zero sits at the high end; right home: at the low end
  return u_.side == Side::Left ? below_(u_.bins) - mass_below : mass_below;
}

double tail_tau_plus(const PartitionTable& t, const UlamResult& hL, long n) {
  if (hL.side != Side::Left) throw DomainError("tail_tau_plus needs the left home density");
  if (n <= 0) return 1.0;
  return HomeIntegral(hL).toZero(t.yMinus(n));
}

double tail_tau_minus(const PartitionTable& t, const UlamResult& hR, long n) {
  if (hR.side != Side::Right) throw DomainError("tail_tau_minus needs the right home density");
  if (n <= 0) return 1.0;
  return HomeIntegral(hR).toZero(t.yPlus(n));
}

MassReport acip_mass(const MapModel& m, const PartitionTable& t, const UlamResult& hL,
                     const UlamResult& hR) {
  if (hL.side != Side::Left || hR.side != Side::Right)
    throw DomainError("acip_mass needs the left and right home densities");
  const long T = std::min<long>(t.n_max, 20000);
  if (T < 10) throw InsufficientData("partition table too shallow for mass sums");
  HomeIntegral HL(hL), HR(hR);

  MassReport r;
  r.depth = T;
  r.beta = m.regime().beta;
  double sumP = 0, sumM = 0, aP = 0, aM = 0, sumP10 = 0, sumM10 = 0;
  for (long n = 1; n <= T; ++n) {
    aP = HL.toZero(t.yMinus(n));
    aM = HR.toZero(t.yPlus(n));
    sumP += aP;
    sumM += aM;
    if (n == T / 10) {
      sumP10 = sumP;
      sumM10 = sumM;
    }
  }
  const MapParams& p = m.params();
  double compP = completion_beyond(plus_tail_law(p), aP, static_cast<double>(T));
  double compM = completion_beyond(minus_tail_law(p), aM, static_cast<double>(T));
  r.partial = 2.0 + sumP + sumM;
  r.partial_tenth = 2.0 + sumP10 + sumM10;
  r.tail_completion = compP + compM;
  r.finite = std::isfinite(compP) && std::isfinite(compM);
  r.e_tau = r.finite ? r.partial + r.tail_completion : kInf;
  return r;
}

SpreadIntegral invariant_integral(const MapModel& m, const PartitionTable& t,
                                  const UlamResult& hL, const UlamResult& hR,
                                  const std::function<double(double, double)>& f,
                                  double f_fix_minus1, double f_fix_plus1, int cell_cap) {
  if (hL.side != Side::Left || hR.side != Side::Right)
    throw DomainError("invariant_integral needs the left and right home densities");
  HomeIntegral HL(hL), HR(hR);
  SpreadIntegral r;

  for_each_cell(m, t, Side::Left, cell_cap, [&](int mi, int ni, double lo, double hi) {
    double q = HL.toZero(lo) - HL.toZero(hi);
    if (!(q > 0)) return;
    // subdivide wide cells; orbit sums vary little across narrow ones
    int panels = std::min(32, 1 + static_cast<int>((hi - lo) / 0.003));
    double step = (hi - lo) / panels;
    for (int j = 0; j < panels; ++j) {
      double plo = lo + j * step, phi = (j + 1 == panels) ? hi : lo + (j + 1) * step;
      double pq = (panels == 1) ? q : HL.toZero(plo) - HL.toZero(phi);
      if (!(pq > 0)) continue;
      CellOrbit orb = cell_orbit(m, {mi, ni, Side::Left}, 0.5 * (plo + phi));
      double s = 0;
      for (std::size_t k = 0; k < orb.points.size(); ++k) s += f(orb.points[k], orb.derivs[k]);
      r.value += pq * s;
    }
    r.covered += q;
    r.cells += 1;
  });

  // survivors beyond the cap spend their time hugging the fixed points
  const int Me = std::min<long>(cell_cap, t.n_max);
  const long T = std::min<long>(t.n_max, 20000);
  const MapParams& p = m.params();
  double spMe = HL.toZero(t.yMinus(Me)), smMe = HR.toZero(t.yPlus(Me));
  double sp = 0, sm = 0, spT = spMe, smT = smMe;
  for (long u = Me; u <= T; ++u) {
    spT = HL.toZero(t.yMinus(u));
    smT = HR.toZero(t.yPlus(u));
    sp += spT;
    sm += smT;
  }
  double cPlus = Me * spMe + sp + completion_beyond(plus_tail_law(p), spT, static_cast<double>(T));
  double cMinus = Me * smMe + sm + completion_beyond(minus_tail_law(p), smT, static_cast<double>(T));
  r.tail = (f_fix_plus1 == 0.0 ? 0.0 : f_fix_plus1 * cPlus) +
           (f_fix_minus1 == 0.0 ? 0.0 : f_fix_minus1 * cMinus);
  return r;
}

double density_tilde_at(const MapModel& m, const UlamResult& hL, double x) {
  if (hL.side != Side::Left) throw DomainError("density_tilde_at needs the left home density");
  if (!(x > -1.0) || !(x < 1.0)) throw DomainError("density query needs x in (-1,1)");
  const double xL = m.zeroCross(Side::Left);
  if (x > xL && x <= 0.0) return density_at(hL, x);  // the tower base is the home density

  const MapParams& p = m.params();
  const double wcap = m.stepDistPlus(m.maxWRight());
  const double zcap = m.stepDistMinus(m.maxZLeft());
  const double yLcap = -m.blendHi(Side::Left);
  const double uRcap = m.blendLo(Side::Right);
  const int kMax = 400;

  // preimage chain back up the track toward +1, one left-home branch
  // preimage per level; the remainder is completed from the known decay
  auto right_track = [&](double w0) {
    double total = 0.0, jac = 1.0, w = w0, term = 0.0;
    int k = 1;
    for (; k <= kMax; ++k) {
      double mag = std::pow(w / p.a1, 1.0 / p.k1);
      double y = (mag <= yLcap) ? -mag : m.invert(Side::Left, 1.0 - w);
      y = std::clamp(y, hL.lo, 0.0);
      term = density_at(hL, y) / (jac * m.deriv(y));
      total += term;
      if (term < 1e-12 * total || w <= 1e-300) return total;
      w = (w <= wcap) ? m.pullbackDistPlus(w) : 1.0 - m.invert(Side::Right, 1.0 - w);
      jac *= (w <= m.maxWRight()) ? m.derivDistPlus(w) : m.deriv(1.0 - w);
    }
    if (p.ell2 > 0) {
      TailLaw L{true, 1.0 + 1.0 / (p.k1 * p.ell2), 0.0};
      total += completion_beyond(L, term, static_cast<double>(kMax));
    }
    return total;
  };
  if (x > 0.0) return right_track(1.0 - x);

  // track toward -1: each level crosses into the right home and restarts
  // a full right-track sum there
  double total = 0.0, jac = 1.0, z = 1.0 + x, term = 0.0;
  int j = 1;
  for (; j <= kMax; ++j) {
    double mag = std::pow(z / p.a2, 1.0 / p.k2);
    double u = (mag <= uRcap) ? mag : m.invert(Side::Right, -1.0 + z);
    term = right_track(1.0 - u) / (jac * m.deriv(u));
    total += term;
    if (term < 1e-10 * total || z <= 1e-300) return total;
    z = (z <= zcap) ? m.pullbackDistMinus(z) : 1.0 + m.invert(Side::Left, -1.0 + z);
    jac *= (z <= m.maxZLeft()) ? m.derivDistMinus(z) : m.deriv(-1.0 + z);
  }
  if (p.ell1 > 0) {
    TailLaw L{true, 1.0 + 1.0 / (p.k2 * p.ell1), 0.0};
    total += completion_beyond(L, term, static_cast<double>(kMax));
  }
  return total;
}

}  // namespace fbm
