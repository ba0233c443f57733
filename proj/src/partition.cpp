#include "fbm/partition.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace fbm {
namespace {

constexpr double kUnderflowFloor = 1e-290;

std::vector<int> log_spaced(int lo, int hi, int count) {
  std::vector<int> out;
  if (lo > hi) return out;
  out.reserve(count);
  double r = double(hi) / double(lo);
  for (int j = 0; j < count; ++j) {
    double f = (count == 1) ? 0.0 : double(j) / double(count - 1);
    int n = int(std::lround(lo * std::pow(r, f)));
    n = std::clamp(n, lo, hi);
    if (out.empty() || n > out.back()) out.push_back(n);
  }
  return out;
}

}  // namespace

PartitionTable compute_boundaries(const MapModel& m, int n_max) {
  if (n_max < 1) throw DomainError("partition depth must be positive");
  const MapParams& p = m.params();
  PartitionTable t;

  std::vector<double> zm, wp;
  zm.reserve(n_max + 1);
  wp.reserve(n_max + 1);
  zm.push_back(1.0 + m.zeroCross(Side::Left));
  wp.push_back(1.0 - m.zeroCross(Side::Right));

  // once the current level is below the image of the blend window the next
  // pullback lands in the outer piece and the closed-form solve applies
  const double zcap = m.stepDistMinus(m.maxZLeft());
  const double wcap = m.stepDistPlus(m.maxWRight());

  bool trunc = false;
  for (int n = 1; n <= n_max; ++n) {
    double z = (zm.back() <= zcap) ? m.pullbackDistMinus(zm.back())
                                   : 1.0 + m.invert(Side::Left, zm.back() - 1.0);
    if (!(z > kUnderflowFloor) || !(z < zm.back())) {
      trunc = true;
      break;
    }
    zm.push_back(z);
  }
  for (int n = 1; n <= n_max; ++n) {
    double w = (wp.back() <= wcap) ? m.pullbackDistPlus(wp.back())
                                   : 1.0 - m.invert(Side::Right, 1.0 - wp.back());
    if (!(w > kUnderflowFloor) || !(w < wp.back())) {
      trunc = true;
      break;
    }
    wp.push_back(w);
  }

  int depth = int(std::min(zm.size(), wp.size())) - 1;
  if (depth < 1) throw ConvergenceFailure("partition table collapsed at depth zero");

  std::vector<double> ym, yp;
  ym.reserve(depth + 1);
  yp.reserve(depth + 1);
  ym.push_back(-m.zeroCross(Side::Left));
  yp.push_back(m.zeroCross(Side::Right));
  const double yLcap = -m.blendHi(Side::Left);
  const double yRcap = m.blendLo(Side::Right);
  for (int n = 1; n <= depth; ++n) {
    double cand = std::pow(wp[n - 1] / p.a1, 1.0 / p.k1);
    ym.push_back(cand <= yLcap ? cand : -m.invert(Side::Left, 1.0 - wp[n - 1]));
    cand = std::pow(zm[n - 1] / p.a2, 1.0 / p.k2);
    yp.push_back(cand <= yRcap ? cand : m.invert(Side::Right, zm[n - 1] - 1.0));
  }

  t.n_max = depth;
  t.truncated = trunc;
  t.zm = Eigen::Map<Eigen::ArrayXd>(zm.data(), depth + 1);
  t.wp = Eigen::Map<Eigen::ArrayXd>(wp.data(), depth + 1);
  t.ym = Eigen::Map<Eigen::ArrayXd>(ym.data(), depth + 1);
  t.yp = Eigen::Map<Eigen::ArrayXd>(yp.data(), depth + 1);

  auto first_inside = [&](const std::vector<double>& y) {
    if (y[0] <= m.iota() + 1e-15) return 0;
    for (int k = 1; k <= depth; ++k)
      if (y[k - 1] <= m.iota() + 1e-15) return k;
    throw ConvergenceFailure("entry cells never reach the explicit region");
  };
  t.n_minus = first_inside(ym);
  t.n_plus = first_inside(yp);
  return t;
}

std::pair<int, int> n_plus_minus(const PartitionTable& t) { return {t.n_minus, t.n_plus}; }

Interval cell_interval(const MapModel& mm, const PartitionTable& t, CellIndex c) {
  if (c.m < 1 || c.n < 1 || c.n > t.n_max)
    throw IndexOutOfRange("cell index outside the computed table");
  const MapParams& p = mm.params();

  // pull the target point in the arrival interval back through m-1 steps on
  // the opposite branch, then once through the home branch; distances from
  // the endpoint are tracked to keep relative precision on deep cells
  auto pull_home = [&](double dist) {
    if (c.side == Side::Left) {
      const double wcap = mm.stepDistPlus(mm.maxWRight());
      for (int k = 1; k < c.m; ++k)
        dist = (dist <= wcap) ? mm.pullbackDistPlus(dist)
                              : 1.0 - mm.invert(Side::Right, 1.0 - dist);
      double mag = std::pow(dist / p.a1, 1.0 / p.k1);
      if (mag <= -mm.blendHi(Side::Left)) return -mag;
      return mm.invert(Side::Left, 1.0 - dist);
    }
    const double zcap = mm.stepDistMinus(mm.maxZLeft());
    for (int k = 1; k < c.m; ++k)
      dist = (dist <= zcap) ? mm.pullbackDistMinus(dist)
                            : 1.0 + mm.invert(Side::Left, dist - 1.0);
    double mag = std::pow(dist / p.a2, 1.0 / p.k2);
    if (mag <= mm.blendLo(Side::Right)) return mag;
    return mm.invert(Side::Right, dist - 1.0);
  };

  Interval iv;
  if (c.side == Side::Left) {
    iv.lo = pull_home(1.0 - t.yPlus(c.n));
    iv.hi = pull_home(1.0 - t.yPlus(c.n - 1));
  } else {
    iv.lo = pull_home(1.0 + t.yMinus(c.n - 1));
    iv.hi = pull_home(1.0 + t.yMinus(c.n));
  }
  return iv;
}

FitReport fit_asymptotics(const MapModel& m, const PartitionTable& t, SeriesKind s) {
  const MapParams& p = m.params();
  FitReport r;
  r.series = s;

  double ell = 0, b = 0, a_div = 1, k_div = 1;  // governing branch data
  bool width = false;                           // width series get the extra 1/(...) factor
  switch (s) {
    case SeriesKind::XMinusDist:
      ell = p.ell1, b = p.b1;
      break;
    case SeriesKind::DeltaMinus:
      ell = p.ell1, b = p.b1, width = true;
      break;
    case SeriesKind::XPlusDist:
      ell = p.ell2, b = p.b2;
      break;
    case SeriesKind::DeltaPlus:
      ell = p.ell2, b = p.b2, width = true;
      break;
    case SeriesKind::YMinusAbs:
      ell = p.ell2, b = p.b2, a_div = p.a1, k_div = p.k1;
      break;
    case SeriesKind::SmallDeltaMinus:
      ell = p.ell2, b = p.b2, a_div = p.a1, k_div = p.k1, width = true;
      break;
    case SeriesKind::YPlusAbs:
      ell = p.ell1, b = p.b1, a_div = p.a2, k_div = p.k2;
      break;
    case SeriesKind::SmallDeltaPlus:
      ell = p.ell1, b = p.b1, a_div = p.a2, k_div = p.k2, width = true;
      break;
  }

  const bool ycase = (a_div != 1.0 || k_div != 1.0) ||
                     (s == SeriesKind::YMinusAbs || s == SeriesKind::YPlusAbs ||
                      s == SeriesKind::SmallDeltaMinus || s == SeriesKind::SmallDeltaPlus);
  r.power_law = ell > 0;
  if (r.power_law) {
    if (!ycase) {
      r.exponent_theory = width ? -(1.0 + 1.0 / ell) : -1.0 / ell;
      r.constant_theory = width ? std::pow(ell, -(1.0 + 1.0 / ell)) * std::pow(b, -1.0 / ell)
                                : std::pow(ell * b, -1.0 / ell);
    } else {
      double beta = k_div * ell;  // tail exponent of the entry-cell sequence
      double B = std::pow(a_div, -1.0 / k_div) * std::pow(ell * b, -1.0 / beta);
      r.exponent_theory = width ? -(1.0 + 1.0 / beta) : -1.0 / beta;
      r.constant_theory = width ? B / beta : B;
    }
  } else {
    r.rate_theory = ycase ? std::log1p(b) / k_div : std::log1p(b);
  }

  auto val = [&](int n) -> double {
    switch (s) {
      case SeriesKind::XMinusDist: return t.zm(n);
      case SeriesKind::XPlusDist: return t.wp(n);
      case SeriesKind::YMinusAbs: return t.ym(n);
      case SeriesKind::YPlusAbs: return t.yp(n);
      case SeriesKind::DeltaMinus: return t.deltaMinus(n);
      case SeriesKind::DeltaPlus: return t.deltaPlus(n);
      case SeriesKind::SmallDeltaMinus: return t.sdeltaMinus(n);
      case SeriesKind::SmallDeltaPlus: return t.sdeltaPlus(n);
    }
    return 0;
  };

  r.n_hi = t.n_max;
  r.n_lo = std::max(2, t.n_max / 10);
  if (r.n_hi - r.n_lo < 4) throw InsufficientData("partition table too shallow for a tail fit");
  auto idx = log_spaced(r.n_lo, r.n_hi, 400);

  // least squares on log v against log n (power) or against n (exponential)
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int cnt = 0;
  std::vector<double> xs, ys;
  for (int n : idx) {
    double v = val(n);
    if (!(v > 0) || !std::isfinite(v)) continue;
    double x = r.power_law ? std::log(double(n)) : double(n);
    double y = std::log(v);
    xs.push_back(x);
    ys.push_back(y);
    sx += x, sy += y, sxx += x * x, sxy += x * y, syy += y * y;
    ++cnt;
  }
  if (cnt < 4) throw InsufficientData("too few usable points in the fit window");
  double denom = cnt * sxx - sx * sx;
  double slope = (cnt * sxy - sx * sy) / denom;
  double icept = (sy - slope * sx) / cnt;
  double ssr = 0, sst = 0, ybar = sy / cnt;
  for (int i = 0; i < cnt; ++i) {
    double pred = icept + slope * xs[i];
    ssr += (ys[i] - pred) * (ys[i] - pred);
    sst += (ys[i] - ybar) * (ys[i] - ybar);
  }
  r.r_squared = (sst > 0) ? 1.0 - ssr / sst : 1.0;

  if (r.power_law) {
    r.exponent_fit = slope;
    r.constant_fit = std::exp(icept);
  } else {
    r.rate_fit = -slope;
    r.bracket_hi = 0;
    for (int n : idx) {
      double v = val(n);
      if (!(v > 0)) continue;
      r.bracket_hi = std::max(r.bracket_hi, v * std::exp(r.rate_theory * n));
    }
  }
  return r;
}

}  // namespace fbm
