#pragma once
#include <cstdint>
#include <vector>

#include "fbm/induced.hpp"
#include "fbm/rng.hpp"
#include "fbm/ulam.hpp"

namespace fbm {

// inverse-CDF draws from a binned home density, optionally pushed toward
// the spread invariant measure by a burn-in under the map
class StationarySampler {
 public:
  StationarySampler(const MapModel& m, const UlamResult& h, long burn_in = 1000);

  double drawHome(Rng& rng) const;  // a point of the home interval
  double draw(Rng& rng) const;      // after burn_in steps of the map

 private:
  const MapModel& m_;
  const UlamResult& h_;
  long burn_in_;
  Eigen::ArrayXd cdf_;
};

struct TauSample {
  long tau_plus = 0, tau_minus = 0;
  long tau() const { return tau_plus + tau_minus; }
};

// consecutive first returns along one orbit in the chosen home interval;
// the first burn_in returns are dropped and the start is seeded inside
std::vector<TauSample> sample_returns(const InducedMap& G, Side home, long count, uint64_t seed,
                                      long burn_in = 100);

}  // namespace fbm
