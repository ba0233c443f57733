#include "fbm/induced.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fbm/rng.hpp"

namespace fbm {

ClimbResult climb(const MapModel& m, Side home, double x, int steps,
                  std::vector<double>* points, std::vector<double>* derivs) {
  if (steps < 1) throw DomainError("climb needs at least one step");
  const MapParams& p = m.params();
  if (points) points->push_back(x);
  if (derivs) derivs->push_back(m.deriv(x, home));
  if (home == Side::Left) {
    // x < 0 maps near +1, then walks down the right branch back toward 0
    double mag = -x;
    double w = (mag <= -m.blendHi(Side::Left)) ? p.a1 * std::pow(mag, p.k1)
                                               : 1.0 - m.eval(x, Side::Left);
    for (int k = 1; k < steps; ++k) {
      if (points) points->push_back(1.0 - w);
      if (derivs) derivs->push_back(w <= m.maxWRight() ? m.derivDistPlus(w) : m.deriv(1.0 - w));
      w = (w <= m.maxWRight()) ? m.stepDistPlus(w) : 1.0 - m.eval(1.0 - w);
    }
    return {1.0 - w, w};
  }
  double w = (x <= m.blendLo(Side::Right)) ? p.a2 * std::pow(x, p.k2)
                                           : 1.0 + m.eval(x, Side::Right);
  for (int k = 1; k < steps; ++k) {
    if (points) points->push_back(-1.0 + w);
    if (derivs) derivs->push_back(w <= m.maxZLeft() ? m.derivDistMinus(w) : m.deriv(-1.0 + w));
    w = (w <= m.maxZLeft()) ? m.stepDistMinus(w) : 1.0 + m.eval(-1.0 + w);
  }
  return {-1.0 + w, w};
}

CellOrbit cell_orbit(const MapModel& m, CellIndex c, double x) {
  CellOrbit o;
  o.points.reserve(c.m + c.n);
  o.derivs.reserve(c.m + c.n);
  ClimbResult across = climb(m, c.side, x, c.m, &o.points, &o.derivs);
  ClimbResult back = climb(m, c.side == Side::Left ? Side::Right : Side::Left, across.landing,
                           c.n, &o.points, &o.derivs);
  o.x_return = back.landing;
  return o;
}

InducedMap::InducedMap(const MapModel& m, const PartitionTable& t) : m_(m), t_(t) {}

Interval InducedMap::home(Side s) const {
  if (s == Side::Left) return {m_.zeroCross(Side::Left), 0.0};
  return {0.0, m_.zeroCross(Side::Right)};
}

ReturnRecord InducedMap::first_return(double x, long cap) const {
  ReturnRecord r;
  r.x0 = x;
  Interval h = home(x < 0 ? Side::Left : Side::Right);
  if (!(x > h.lo) || !(x < h.hi)) throw DomainError("start point outside the home interval");
  double y = x;
  for (long k = 0; k < cap; ++k) {
    // inside an outer closed-form piece, step in endpoint distance: the
    // x-space update rounds to a halt once the correction drops below one
    // ulp of the endpoint, while the distance update keeps full precision
    if (y >= m_.blendHi(Side::Right)) {
      double w = 1.0 - y;
      const double w_home = 1.0 - m_.zeroCross(Side::Right);  // stay above the home
      while (w <= m_.maxWRight() && w < w_home && k < cap) {
        r.log_deriv += std::log(m_.derivDistPlus(w));
        double wn = m_.stepDistPlus(w);
        if (wn == w)
          throw ConvergenceFailure("orbit stalled at machine precision near an endpoint");
        w = wn;
        ++(w < 1.0 ? r.tau_plus : r.tau_minus);  // the last step may cross zero
        ++r.tau;
        ++k;
      }
      y = 1.0 - w;
      if (r.tau > 0 && y > h.lo && y < h.hi) {
        r.x_return = y;
        return r;
      }
      if (k >= cap) break;
    } else if (y <= m_.blendLo(Side::Left)) {
      double z = 1.0 + y;
      const double z_home = 1.0 + m_.zeroCross(Side::Left);  // stay below the home
      while (z <= m_.maxZLeft() && z < z_home && k < cap) {
        r.log_deriv += std::log(m_.derivDistMinus(z));
        double zn = m_.stepDistMinus(z);
        if (zn == z)
          throw ConvergenceFailure("orbit stalled at machine precision near an endpoint");
        z = zn;
        ++(z > 1.0 ? r.tau_plus : r.tau_minus);
        ++r.tau;
        ++k;
      }
      y = -1.0 + z;
      if (r.tau > 0 && y > h.lo && y < h.hi) {
        r.x_return = y;
        return r;
      }
      if (k >= cap) break;
    }
    if (y == 0.0)  // possible once the mantissa is spent on exactly affine pieces
      throw ConvergenceFailure("orbit landed on the branch point between the homes");
    r.log_deriv += std::log(m_.deriv(y));
    double ynext = m_.eval(y);
    if (ynext == y) throw ConvergenceFailure("orbit stalled at machine precision near an endpoint");
    y = ynext;
    if (y > 0)
      ++r.tau_plus;
    else
      ++r.tau_minus;
    ++r.tau;
    if (y > h.lo && y < h.hi) {
      r.x_return = y;
      return r;
    }
  }
  throw BudgetExceeded("first return exceeded the iteration cap");
}

namespace {

// index m with arr(m) < mag <= arr(m-1) in a strictly decreasing table
int bracket_decreasing(const Eigen::ArrayXd& arr, int n_max, double mag) {
  int lo = 1, hi = n_max;
  while (lo < hi) {
    int mid = (lo + hi) / 2;
    if (arr(mid) < mag)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

}  // namespace

CellIndex InducedMap::locate_cell(double x) const {
  CellIndex c;
  c.side = x < 0 ? Side::Left : Side::Right;
  Interval h = home(c.side);
  if (!(x > h.lo) || !(x < h.hi)) throw DomainError("point outside both home intervals");
  const Eigen::ArrayXd& own = (c.side == Side::Left) ? t_.ym : t_.yp;
  double mag = std::abs(x);
  if (mag <= own(t_.n_max)) throw IndexOutOfRange("point deeper than the computed table");
  c.m = bracket_decreasing(own, t_.n_max, mag);

  double arrival = climb(m_, c.side, x, c.m).landing;
  const Eigen::ArrayXd& opp = (c.side == Side::Left) ? t_.yp : t_.ym;
  double omag = std::abs(arrival);
  if (!(omag < opp(0)) || omag <= opp(t_.n_max))
    throw IndexOutOfRange("arrival point outside the computed table");
  c.n = bracket_decreasing(opp, t_.n_max, omag);
  return c;
}

double InducedMap::phi(double x) const {
  const MapParams& p = m_.params();
  if (!(x > 0) || !(x < m_.blendLo(Side::Right)))
    throw DomainError("step map needs a point in the explicit right near-zero piece");
  double zu = p.a2 * std::pow(x, p.k2);  // 1 + g(x)
  double zv = (zu <= m_.maxZLeft()) ? m_.stepDistMinus(zu) : 1.0 + m_.eval(zu - 1.0);
  double mag = std::pow(zv / p.a2, 1.0 / p.k2);
  if (!(mag < m_.blendLo(Side::Right)))
    throw DomainError("step image escapes the explicit right near-zero piece");
  return mag;
}

ExpansionCheck InducedMap::check_expansion(int n_to, int samples_per_cell) const {
  ExpansionCheck ec;
  ec.n_from = std::max(m_.nPlusCert(), 1);
  ec.n_to = n_to;
  if (t_.n_max < n_to + 1) throw InsufficientData("partition table shallower than the check range");
  ec.min_ratio = 1e300;
  const MapParams& p = m_.params();
  for (int n = ec.n_from; n <= n_to; ++n) {
    double lo = t_.yPlus(n + 1), hi = t_.yPlus(n);
    ++ec.cells;
    for (int s = 0; s < samples_per_cell; ++s) {
      double x = lo + (hi - lo) * (s + 0.5) / samples_per_cell;
      double zu = p.a2 * std::pow(x, p.k2);
      double d1 = m_.deriv(x, Side::Right);
      double d2 = (zu <= m_.maxZLeft()) ? m_.derivDistMinus(zu) : m_.deriv(zu - 1.0);
      double ratio = d1 * d2 / m_.deriv(phi(x), Side::Right);
      ++ec.samples;
      if (!(ratio > 1.0)) ++ec.violations;
      ec.min_ratio = std::min(ec.min_ratio, ratio);
    }
  }
  return ec;
}

DistortionEstimate InducedMap::estimate_distortion(int depth, int pairs_per_cell,
                                                   uint64_t seed) const {
  if (depth < 2 || depth > t_.n_max) throw DomainError("distortion depth outside the table");
  DistortionEstimate de;
  de.depth = depth;
  Rng rng(seed, 7);
  std::vector<double> lx, ly, px, py;
  // fitted Lipschitz coefficient: least squares of |log G' ratio| against image
  // distance, through the origin. A running sup would instead chase the local
  // log-slope spike where an orbit's last step crosses a blend seam, and that
  // extreme-value estimate never settles.
  double sxy = 0, sxx = 0;
  for (Side side : {Side::Left, Side::Right}) {
    for (int n = 1; n <= depth; ++n) {
      double lo, hi;
      if (side == Side::Left) {
        lo = -t_.ym(n - 1);
        hi = -t_.ym(n);
      } else {
        lo = t_.yp(n);
        hi = t_.yp(n - 1);
      }
      for (int q = 0; q < pairs_per_cell; ++q) {
        double x = rng.uniform(lo, hi), y = rng.uniform(lo, hi);
        if (x == y) continue;
        lx.clear();
        ly.clear();
        px.clear();
        py.clear();
        ClimbResult cx = climb(m_, side, x, n, &px, &lx);
        ClimbResult cy = climb(m_, side, y, n, &py, &ly);
        double den = std::abs(cx.landing_dist - cy.landing_dist);
        if (!(den > 0)) continue;
        double sx = 0, sy = 0, num = 0;
        for (int k = n - 1; k >= 0; --k) {  // suffix products cover every split point
          sx += std::log(lx[k]);
          sy += std::log(ly[k]);
          num = std::max(num, std::abs(sx - sy));
        }
        sxy += num * den;
        sxx += den * den;
        ++de.pairs;
      }
    }
  }
  if (sxx > 0) de.d_hat = sxy / sxx;
  return de;
}

double InducedMap::min_return_deriv(int cap, int samples_per_cell) const {
  if (cap < 1 || cap > t_.n_max) throw DomainError("cell cap outside the table");
  double best = 1e300;
  for (Side side : {Side::Left, Side::Right}) {
    for (int mi = 1; mi <= cap; ++mi) {
      for (int ni = 1; ni <= cap; ++ni) {
        Interval cell = cell_interval(m_, t_, {mi, ni, side});
        for (int s = 0; s < samples_per_cell; ++s) {
          double x = cell.lo + (cell.hi - cell.lo) * (s + 0.5) / samples_per_cell;
          CellOrbit o = cell_orbit(m_, {mi, ni, side}, x);
          double acc = 0;
          for (double d : o.derivs) acc += std::log(d);
          best = std::min(best, std::exp(acc));
        }
      }
    }
  }
  return best;
}

void for_each_cell(const MapModel& m, const PartitionTable& t, Side side, int cap,
                   const std::function<void(int, int, double, double)>& visit) {
  const int M = std::min(cap, t.n_max);
  const MapParams& p = m.params();
  const double wcap = m.stepDistPlus(m.maxWRight());
  const double zcap = m.stepDistMinus(m.maxZLeft());
  const double yLcap = -m.blendHi(Side::Left);
  const double yRcap = m.blendLo(Side::Right);

  // tgt[n] holds the opposite-endpoint distance of the arrival boundary,
  // pulled back mi-1 steps along the opposite branch; edge[n] is its
  // home-branch preimage
  std::vector<double> tgt(M + 1), edge(M + 1);
  for (int n = 0; n <= M; ++n)
    tgt[n] = (side == Side::Left) ? 1.0 - t.yPlus(n) : 1.0 + t.yMinus(n);

  for (int mi = 1; mi <= M; ++mi) {
    if (mi > 1) {
      for (int n = 0; n <= M; ++n) {
        if (side == Side::Left)
          tgt[n] = (tgt[n] <= wcap) ? m.pullbackDistPlus(tgt[n])
                                    : 1.0 - m.invert(Side::Right, 1.0 - tgt[n]);
        else
          tgt[n] = (tgt[n] <= zcap) ? m.pullbackDistMinus(tgt[n])
                                    : 1.0 + m.invert(Side::Left, tgt[n] - 1.0);
      }
    }
    for (int n = 0; n <= M; ++n) {
      if (side == Side::Left) {
        double mag = std::pow(tgt[n] / p.a1, 1.0 / p.k1);
        edge[n] = (mag <= yLcap) ? -mag : m.invert(Side::Left, 1.0 - tgt[n]);
      } else {
        double mag = std::pow(tgt[n] / p.a2, 1.0 / p.k2);
        edge[n] = (mag <= yRcap) ? mag : m.invert(Side::Right, tgt[n] - 1.0);
      }
    }
    for (int ni = 1; ni <= M; ++ni) {
      double clo = (side == Side::Left) ? edge[ni] : edge[ni - 1];
      double chi = (side == Side::Left) ? edge[ni - 1] : edge[ni];
      if (chi > clo) visit(mi, ni, clo, chi);
    }
  }
}

}  // namespace fbm
