#pragma once
#include <functional>

#include "fbm/ulam.hpp"

namespace fbm {

// cumulative mass of a binned home density, measured from the zero end
class HomeIntegral {
 public:
  explicit HomeIntegral(const UlamResult& u);
  // integral over (a, 0] on the left home, [0, a) on the right
  double toZero(double a) const;

 private:
  const UlamResult& u_;
  Eigen::ArrayXd below_;  // mass of bins strictly below bin i
};

// return-component tail masses: tau+ > n is the home interval (y_n^-, 0),
// tau- > n carries over to [0, y_n^+) on the other home
double tail_tau_plus(const PartitionTable& t, const UlamResult& hL, long n);
double tail_tau_minus(const PartitionTable& t, const UlamResult& hR, long n);

// total mass of the spread measure, which equals the expected return time.
// partial sums run through the table depth; the remainder is completed from
// the known decay of the survivor sequence, anchored at the last exact term.
struct MassReport {
  double e_tau = 0;
  double partial = 0;        // 2 + survivor sums through depth
  double partial_tenth = 0;  // same sums through depth/10
  double tail_completion = 0;
  long depth = 0;
  bool finite = true;
  double beta = 0;
};
MassReport acip_mass(const MapModel& m, const PartitionTable& t, const UlamResult& hL,
                     const UlamResult& hR);

// integral of f against the unnormalized spread measure, cell by cell. The
// integrand receives each orbit point together with the map derivative
// there, so derivative functionals stay exact in distance coordinates.
// Orbits of cells beyond the cap hug the fixed points, so their time is
// weighted by the integrand limits f_fix_minus1 and f_fix_plus1; a zero
// limit contributes zero even when the completion itself diverges.
struct SpreadIntegral {
  double value = 0;  // sum over enumerated cells
  double tail = 0;   // fixed-point completion for the out-of-cap survivors
  double covered = 0;
  long cells = 0;
  double total() const { return value + tail; }
};
SpreadIntegral invariant_integral(const MapModel& m, const PartitionTable& t,
                                  const UlamResult& hL, const UlamResult& hR,
                                  const std::function<double(double, double)>& f,
                                  double f_fix_minus1, double f_fix_plus1, int cell_cap = 400);

// density of the spread measure at a point, by summing preimage chains back
// to the left home. On the left home this is the home density itself; the
// value on the right home is reconstructed independently, so it can be
// compared against the right home density.
double density_tilde_at(const MapModel& m, const UlamResult& hL, double x);

}  // namespace fbm
