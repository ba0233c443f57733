#include "fbm/fit.hpp"

#include <algorithm>
#include <cmath>

#include "fbm/map.hpp"

namespace fbm {

LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw InsufficientData("linear_fit needs at least two points");
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) throw InsufficientData("linear_fit abscissae are degenerate");
  LinFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
  f.n = n;
  return f;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_to_normal(std::vector<double> vals, double mean, double sd) {
  if (vals.size() < 2) throw InsufficientData("ks_to_normal needs a sample");
  if (!(sd > 0.0)) throw DomainError("ks_to_normal needs sd > 0");
  std::sort(vals.begin(), vals.end());
  const double n = static_cast<double>(vals.size());
  double d = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double f = normal_cdf((vals[i] - mean) / sd);
    d = std::max(d, std::abs((static_cast<double>(i) + 1.0) / n - f));
    d = std::max(d, std::abs(static_cast<double>(i) / n - f));
  }
  return d;
}

double hill_tail_index(std::vector<double> vals, double tail_fraction, bool upper) {
  if (!(tail_fraction > 0.0 && tail_fraction < 0.5))
    throw DomainError("tail_fraction must be in (0, 0.5)");
  if (!upper)
    for (auto& v : vals) v = -v;
  std::sort(vals.begin(), vals.end());
  const long n = static_cast<long>(vals.size());
  const long k = std::max<long>(5, static_cast<long>(tail_fraction * n));
  if (k + 1 > n) throw InsufficientData("hill_tail_index needs a larger sample");
  const double x_k = vals[n - 1 - k];
  if (!(x_k > 0.0)) throw InsufficientData("hill_tail_index tail is not positive");
  double s = 0.0;
  for (long i = 0; i < k; ++i) s += std::log(vals[n - 1 - i] / x_k);
  return static_cast<double>(k) / s;
}

}  // namespace fbm
