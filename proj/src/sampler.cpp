#include "fbm/sampler.hpp"

#include <algorithm>
#include <cmath>

namespace fbm {

StationarySampler::StationarySampler(const MapModel& m, const UlamResult& h, long burn_in)
    : m_(m), h_(h), burn_in_(burn_in), cdf_(h.bins) {
  double acc = 0;
  for (int i = 0; i < h.bins; ++i) {
    acc += h.mass(i);
    cdf_(i) = acc;
  }
  if (!(acc > 0)) throw InsufficientData("home density carries no mass");
  cdf_ /= acc;
}

double StationarySampler::drawHome(Rng& rng) const {
  double u = rng.uniform();
  const double* beg = cdf_.data();
  const double* end = beg + h_.bins;
  int i = static_cast<int>(std::upper_bound(beg, end, u) - beg);
  i = std::min(i, h_.bins - 1);
  double lo_cdf = i == 0 ? 0.0 : cdf_(i - 1);
  double span = cdf_(i) - lo_cdf;
  double frac = span > 0 ? (u - lo_cdf) / span : 0.5;
  double x = h_.lo + (i + frac) * h_.bin_width();
  // keep strictly inside the open home interval
  if (x <= h_.lo) x = std::nextafter(h_.lo, h_.hi);
  if (x >= h_.hi) x = std::nextafter(h_.hi, h_.lo);
  return x;
}

double StationarySampler::draw(Rng& rng) const {
  double x = drawHome(rng);
  for (long k = 0; k < burn_in_; ++k) {
    x = x == 0.0 ? m_.eval(x, Side::Left) : m_.eval(x);
    x = std::clamp(x, -1.0, 1.0);
  }
  return x;
}

std::vector<TauSample> sample_returns(const InducedMap& G, Side home, long count, uint64_t seed,
                                      long burn_in) {
  Rng rng(seed, 0);
  Interval h = G.home(home);
  auto fresh = [&] { return h.lo + (h.hi - h.lo) * (0.25 + 0.5 * rng.uniform()); };
  double x = fresh();
  std::vector<TauSample> out;
  out.reserve(count);
  // exactly affine branches can drain the mantissa and park an excursion on the
  // branch point; restart such dead chains from a fresh home draw, with a cap so a
  // systematic failure still surfaces instead of looping
  const long max_restarts = count / 4 + 16;
  long restarts = 0;
  long warm = burn_in;
  long done = 0;
  while (done < count) {
    try {
      ReturnRecord rec = G.first_return(x);
      x = rec.x_return;
      if (warm > 0) {
        --warm;
      } else {
        out.push_back({rec.tau_plus, rec.tau_minus});
        ++done;
      }
    } catch (const ConvergenceFailure&) {
      if (++restarts > max_restarts) throw;
      x = fresh();
      warm = std::max<long>(warm, 4);
    }
  }
  return out;
}

}  // namespace fbm
