#include "fbm/map.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace fbm {
namespace {

constexpr double kRootTol = 1e-13;
constexpr int kMaxRootIter = 200;

// C^2 smoothstep on [0,1] and its first two derivatives
inline double smooth(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
inline double dsmooth(double t) { double u = t * (1.0 - t); return 30.0 * u * u; }
inline double ddsmooth(double t) { return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t); }

void validate(const MapParams& p) {
  auto bad = [](const std::string& msg) { throw DomainError("map parameters: " + msg); };
  if (!(p.ell1 >= 0) || !(p.ell2 >= 0)) bad("ell1, ell2 must be >= 0");
  if (!(p.k1 > 0) || !(p.k2 > 0)) bad("k1, k2 must be > 0");
  if (!(p.a1 > 0) || !(p.a2 > 0)) bad("a1, a2 must be > 0");
  if (p.k1 == 1.0 && !(p.a1 > 1)) bad("k1 = 1 requires a1 > 1");
  if (p.k2 == 1.0 && !(p.a2 > 1)) bad("k2 = 1 requires a2 > 1");
  if (!(p.b1 > 0) || !(p.b2 > 0)) bad("b1, b2 must be > 0");
  if (!(p.iota > 0) || !(p.iota < 1)) bad("iota must lie in (0,1)");
  if (!(p.blend_width > 0) || !(p.blend_width < 1)) bad("blend_width must lie in (0,1)");
  if (p.ell1 == 0 && !(p.xi_coeff1 >= 0)) bad("ell1 = 0 requires xi_coeff1 >= 0");
  if (p.ell2 == 0 && !(p.xi_coeff2 >= 0)) bad("ell2 = 0 requires xi_coeff2 >= 0");
}

}  // namespace

RegimeReport classify(const MapParams& p) {
  RegimeReport r;
  r.beta1 = p.k2 * p.ell1;
  r.beta2 = p.k1 * p.ell2;
  r.beta = std::max(r.beta1, r.beta2);
  r.finite_acip = r.beta < 1.0;
  if (r.beta == 0.0) {
    r.mixing = "exponential";
  } else if (r.beta < 1.0) {
    r.mixing = "polynomial";
    r.poly_rate = (1.0 - r.beta) / r.beta;
  } else {
    r.mixing = "infinite";
  }
  return r;
}

MapModel::MapModel(const MapParams& p) : p_(p) {
  validate(p_);
  regime_ = classify(p_);

  // Shrink iota until both inter-region gaps are wide enough to host a blend.
  const double gap_min = 0.02;
  auto min_gap = [&](double i) {
    double gl = 1.0 - i - p_.a2 * std::pow(i, p_.k2);
    double gr = 1.0 - i - p_.a1 * std::pow(i, p_.k1);
    return std::min(gl, gr);
  };
  if (min_gap(p_.iota) < gap_min) {
    double lo = 0.0, hi = p_.iota;  // min_gap(0+) = 1, decreasing in iota
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      double mid = 0.5 * (lo + hi);
      (min_gap(mid) >= gap_min ? lo : hi) = mid;
    }
    p_.iota = lo;
    iota_reduced_ = true;
    if (!(p_.iota > 0)) throw RangeMismatch("explicit regions leave no room for a blend");
  }

  uL_ = -1.0 + p_.a2 * std::pow(p_.iota, p_.k2);
  uR_ = 1.0 - p_.a1 * std::pow(p_.iota, p_.k1);
  double gapL = -p_.iota - uL_;
  double gapR = uR_ - p_.iota;
  wLlo_ = uL_ + 0.5 * (1.0 - p_.blend_width) * gapL;
  wLhi_ = -p_.iota - 0.5 * (1.0 - p_.blend_width) * gapL;
  wRlo_ = p_.iota + 0.5 * (1.0 - p_.blend_width) * gapR;
  wRhi_ = uR_ - 0.5 * (1.0 - p_.blend_width) * gapR;

  checkMonotone();

  x0m_ = invert(Side::Left, 0.0);
  x0p_ = invert(Side::Right, 0.0);
  certifyExpansion();
}

double MapModel::gNearMinusOne(double x) const {
  double z = 1.0 + x;
  if (p_.ell1 > 0) return x + p_.b1 * std::pow(z, 1.0 + p_.ell1);
  return -1.0 + (1.0 + p_.b1) * z + p_.xi_coeff1 * z * z;
}

double MapModel::gLeftOfZero(double x) const { return 1.0 - p_.a1 * std::pow(-x, p_.k1); }

double MapModel::gRightOfZero(double x) const { return -1.0 + p_.a2 * std::pow(x, p_.k2); }

double MapModel::gNearPlusOne(double x) const {
  double w = 1.0 - x;
  if (p_.ell2 > 0) return x - p_.b2 * std::pow(w, 1.0 + p_.ell2);
  return 1.0 - (1.0 + p_.b2) * w - p_.xi_coeff2 * w * w;
}

double MapModel::evalLeft(double x) const {
  if (x <= wLlo_) return gNearMinusOne(x);
  if (x >= wLhi_) return gLeftOfZero(x);
  double t = (x - wLlo_) / (wLhi_ - wLlo_);
  double s = smooth(t);
  return (1.0 - s) * gNearMinusOne(x) + s * gLeftOfZero(x);
}

double MapModel::evalRight(double x) const {
  if (x <= wRlo_) return gRightOfZero(x);
  if (x >= wRhi_) return gNearPlusOne(x);
  double t = (x - wRlo_) / (wRhi_ - wRlo_);
  double s = smooth(t);
  return (1.0 - s) * gRightOfZero(x) + s * gNearPlusOne(x);
}

double MapModel::eval(double x) const {
  if (x == 0.0) throw DomainError("eval at 0 requires a side flag");
  if (x < -1.0 || x > 1.0) throw DomainError("eval outside [-1,1]");
  return x < 0 ? evalLeft(x) : evalRight(x);
}

double MapModel::eval(double x, Side sideAtZero) const {
  if (x != 0.0) return eval(x);
  return sideAtZero == Side::Left ? 1.0 : -1.0;
}

double MapModel::derivLeft(double x, int order) const {
  double z = 1.0 + x, ax = -x;
  auto fp = [&](double zz) {
    if (p_.ell1 > 0) return 1.0 + p_.b1 * (1.0 + p_.ell1) * std::pow(zz, p_.ell1);
    return 1.0 + p_.b1 + 2.0 * p_.xi_coeff1 * zz;
  };
  auto fpp = [&](double zz) {
    if (p_.ell1 > 0) return p_.b1 * (1.0 + p_.ell1) * p_.ell1 * std::pow(zz, p_.ell1 - 1.0);
    return 2.0 * p_.xi_coeff1;
  };
  auto qp = [&](double a) { return p_.a1 * p_.k1 * std::pow(a, p_.k1 - 1.0); };
  auto qpp = [&](double a) { return -p_.a1 * p_.k1 * (p_.k1 - 1.0) * std::pow(a, p_.k1 - 2.0); };
  if (x <= wLlo_) return order == 1 ? fp(z) : fpp(z);
  if (x >= wLhi_) return order == 1 ? qp(ax) : qpp(ax);
  double wdt = wLhi_ - wLlo_;
  double t = (x - wLlo_) / wdt;
  double s = smooth(t), ds = dsmooth(t) / wdt, dds = ddsmooth(t) / (wdt * wdt);
  double f = gNearMinusOne(x), q = gLeftOfZero(x);
  if (order == 1) return (1.0 - s) * fp(z) + s * qp(ax) + ds * (q - f);
  return (1.0 - s) * fpp(z) + s * qpp(ax) + 2.0 * ds * (qp(ax) - fp(z)) + dds * (q - f);
}

double MapModel::derivRight(double x, int order) const {
  double w = 1.0 - x;
  auto qp = [&](double xx) { return p_.a2 * p_.k2 * std::pow(xx, p_.k2 - 1.0); };
  auto qpp = [&](double xx) { return p_.a2 * p_.k2 * (p_.k2 - 1.0) * std::pow(xx, p_.k2 - 2.0); };
  auto fp = [&](double ww) {
    if (p_.ell2 > 0) return 1.0 + p_.b2 * (1.0 + p_.ell2) * std::pow(ww, p_.ell2);
    return 1.0 + p_.b2 + 2.0 * p_.xi_coeff2 * ww;
  };
  auto fpp = [&](double ww) {
    if (p_.ell2 > 0) return -p_.b2 * (1.0 + p_.ell2) * p_.ell2 * std::pow(ww, p_.ell2 - 1.0);
    return -2.0 * p_.xi_coeff2;
  };
  if (x <= wRlo_) return order == 1 ? qp(x) : qpp(x);
  if (x >= wRhi_) return order == 1 ? fp(w) : fpp(w);
  double wdt = wRhi_ - wRlo_;
  double t = (x - wRlo_) / wdt;
  double s = smooth(t), ds = dsmooth(t) / wdt, dds = ddsmooth(t) / (wdt * wdt);
  double q = gRightOfZero(x), f = gNearPlusOne(x);
  if (order == 1) return (1.0 - s) * qp(x) + s * fp(w) + ds * (f - q);
  return (1.0 - s) * qpp(x) + s * fpp(w) + 2.0 * ds * (fp(w) - qp(x)) + dds * (f - q);
}

double MapModel::deriv(double x, int order) const {
  if (x == 0.0) throw DomainError("deriv at 0 requires a side flag");
  if (x < -1.0 || x > 1.0) throw DomainError("deriv outside [-1,1]");
  if (order != 1 && order != 2) throw DomainError("deriv order must be 1 or 2");
  return x < 0 ? derivLeft(x, order) : derivRight(x, order);
}

double MapModel::deriv(double x, Side sideAtZero, int order) const {
  if (x != 0.0) return deriv(x, order);
  if (order != 1 && order != 2) throw DomainError("deriv order must be 1 or 2");
  return sideAtZero == Side::Left ? derivLeft(-0.0, order) : derivRight(0.0, order);
}

double MapModel::invert(Side branch, double y) const {
  if (y < -1.0 || y > 1.0) throw DomainError("invert target outside [-1,1]");
  double lo = branch == Side::Left ? -1.0 : 0.0;
  double hi = branch == Side::Left ? 0.0 : 1.0;
  auto g = [&](double x) {
    if (x == 0.0) return branch == Side::Left ? 1.0 : -1.0;
    return branch == Side::Left ? evalLeft(x) : evalRight(x);
  };
  // bisection to a narrow bracket, then Newton polish
  int it = 0;
  while (hi - lo > 1e-12 && it++ < kMaxRootIter) {
    double mid = 0.5 * (lo + hi);
    (g(mid) < y ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int k = 0; k < 8; ++k) {
    double r = g(x) - y;
    if (std::abs(r) <= kRootTol) break;
    double d = x < 0 ? derivLeft(x, 1) : derivRight(x, 1);
    if (!(d > 0)) break;
    double nx = x - r / d;
    if (nx < lo || nx > hi) nx = 0.5 * (lo + hi);  // the root may sit on a bracket end
    x = nx;
  }
  if (std::abs(g(x) - y) > 1e-10)
    throw ConvergenceFailure("branch inverse did not converge");
  return x;
}

double MapModel::stepDistMinus(double z) const {
  if (p_.ell1 > 0) return z + p_.b1 * std::pow(z, 1.0 + p_.ell1);
  return (1.0 + p_.b1) * z + p_.xi_coeff1 * z * z;
}

double MapModel::stepDistPlus(double w) const {
  if (p_.ell2 > 0) return w + p_.b2 * std::pow(w, 1.0 + p_.ell2);
  return (1.0 + p_.b2) * w + p_.xi_coeff2 * w * w;
}

double MapModel::derivDistMinus(double z) const {
  if (p_.ell1 > 0) return 1.0 + p_.b1 * (1.0 + p_.ell1) * std::pow(z, p_.ell1);
  return (1.0 + p_.b1) + 2.0 * p_.xi_coeff1 * z;
}

double MapModel::derivDistPlus(double w) const {
  if (p_.ell2 > 0) return 1.0 + p_.b2 * (1.0 + p_.ell2) * std::pow(w, p_.ell2);
  return (1.0 + p_.b2) + 2.0 * p_.xi_coeff2 * w;
}

namespace {

// solve s(z) = Z for monotone s on (0, Z], relative tolerance on the root
template <class F, class DF>
double solve_monotone(F s, DF ds, double Z) {
  double lo = 0.0, hi = Z;
  for (int it = 0; it < 120 && hi - lo > 1e-15 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    (s(mid) < Z ? lo : hi) = mid;
  }
  double z = 0.5 * (lo + hi);
  for (int k = 0; k < 4; ++k) {
    double r = s(z) - Z;
    double d = ds(z);
    if (!(d > 0)) break;
    double nz = z - r / d;
    if (nz > 0 && nz < Z) z = nz;
  }
  return z;
}

}  // namespace

double MapModel::pullbackDistMinus(double Z) const {
  if (!(Z > 0)) throw DomainError("pullbackDistMinus needs Z > 0");
  if (p_.ell1 == 0) {  // quadratic closed form, stable branch
    double s = 1.0 + p_.b1, c = p_.xi_coeff1;
    return 2.0 * Z / (s + std::sqrt(s * s + 4.0 * c * Z));
  }
  return solve_monotone(
      [&](double z) { return stepDistMinus(z); },
      [&](double z) { return 1.0 + p_.b1 * (1.0 + p_.ell1) * std::pow(z, p_.ell1); }, Z);
}

double MapModel::pullbackDistPlus(double W) const {
  if (!(W > 0)) throw DomainError("pullbackDistPlus needs W > 0");
  if (p_.ell2 == 0) {
    double s = 1.0 + p_.b2, c = p_.xi_coeff2;
    return 2.0 * W / (s + std::sqrt(s * s + 4.0 * c * W));
  }
  return solve_monotone(
      [&](double w) { return stepDistPlus(w); },
      [&](double w) { return 1.0 + p_.b2 * (1.0 + p_.ell2) * std::pow(w, p_.ell2); }, W);
}

void MapModel::checkMonotone() const {
  const int grid = 10000;
  for (int i = 1; i < grid; ++i) {
    double xl = -1.0 + static_cast<double>(i) / grid;
    double xr = static_cast<double>(i) / grid;
    if (!(derivLeft(xl, 1) > 0))
      throw NonMonotone("left branch derivative not positive at x = " + std::to_string(xl));
    if (!(derivRight(xr, 1) > 0))
      throw NonMonotone("right branch derivative not positive at x = " + std::to_string(xr));
  }
}

void MapModel::certifyExpansion() {
  // Boundary points y_n of the first-entry cells, each side, until the cells
  // sit inside the explicit regions around 0. The certificate samples the
  // n-step derivative over every earlier cell.
  const int cap = 2000;
  auto first_inside = [&](Side side) {
    std::vector<double> ym;  // |y_n| magnitudes, decreasing
    std::vector<double> xo;  // opposite-side x_n sequence feeding the y's
    Side other = side == Side::Left ? Side::Right : Side::Left;
    double x0_here = side == Side::Left ? x0m_ : x0p_;
    double x0_other = side == Side::Left ? x0p_ : x0m_;
    ym.push_back(std::abs(x0_here));
    xo.push_back(x0_other);
    int n = ym[0] <= p_.iota ? 0 : -1;
    for (int k = 1; n < 0; ++k) {
      if (k > cap) throw BudgetExceeded("first-entry cells do not reach the explicit region");
      double y = invert(side, xo[k - 1]);
      ym.push_back(std::abs(y));
      xo.push_back(invert(other, xo[k - 1]));
      if (ym[k - 1] <= p_.iota) n = k;
    }
    return std::pair<int, std::vector<double>>(n, ym);
  };

  auto [nm, ymm] = first_inside(Side::Left);
  auto [np, ymp] = first_inside(Side::Right);
  n_minus_cert_ = nm;
  n_plus_cert_ = np;

  double lam = 1e300;
  auto scan = [&](Side side, int ncells, const std::vector<double>& ym) {
    int upto = std::max(ncells, 1);
    for (int n = 1; n <= upto && n < static_cast<int>(ym.size()); ++n) {
      double a = ym[n - 1], b = ym[n];  // cell is (-a,-b) on the left, (b,a) on the right
      int samples = n <= 50 ? 100 : 20;
      for (int s = 1; s < samples; ++s) {
        double mag = b + (a - b) * s / samples;
        double x = side == Side::Left ? -mag : mag;
        double logd = 0.0;
        for (int k = 0; k < n; ++k) {
          logd += std::log(deriv(x, 1));
          x = eval(x);
        }
        lam = std::min(lam, std::exp(logd));
      }
    }
  };
  scan(Side::Left, nm, ymm);
  scan(Side::Right, np, ymp);
  lambda_ = lam == 1e300 ? 1.0 + p_.b1 : lam;  // no pre-entry cells at all
  if (!(lambda_ > 1.0 + 1e-9))
    throw ExpansionFailure("first-entry iterates are not uniformly expanding");
}

}  // namespace fbm
