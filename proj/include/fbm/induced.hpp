#pragma once
#include <cstdint>
#include <functional>
#include <vector>

#include "fbm/map.hpp"
#include "fbm/partition.hpp"

namespace fbm {

struct ReturnRecord {
  double x0 = 0;        // starting point
  double x_return = 0;  // first point back in the home interval
  long tau = 0;         // return time
  long tau_plus = 0;    // iterates spent right of 0
  long tau_minus = 0;   // iterates spent left of 0
  double log_deriv = 0; // log of the return-map derivative at x0
};

struct ExpansionCheck {
  int n_from = 0, n_to = 0;
  int cells = 0, samples = 0, violations = 0;
  double min_ratio = 0;  // min over samples of (g^2)'(x) / g'(step(x))
};

struct DistortionEstimate {
  int depth = 0;
  long pairs = 0;
  double d_hat = 0;  // fitted slope of |log derivative ratio| against image distance
};

// One passage from an entry cell beside 0 across to the other side of 0:
// steps applications of the map, climbing the opposite branch. Computed in
// endpoint-distance coordinates so deep passages keep relative precision.
struct ClimbResult {
  double landing = 0;       // g^steps(x), in the opposite home interval
  double landing_dist = 0;  // exact distance of the pre-landing track endpoint
};
ClimbResult climb(const MapModel& m, Side home, double x, int steps,
                  std::vector<double>* points = nullptr, std::vector<double>* derivs = nullptr);

// full return orbit of a point in a known cell
struct CellOrbit {
  std::vector<double> points;  // g^k(x), k = 0 .. m+n-1
  std::vector<double> derivs;  // g' at those points
  double x_return = 0;         // g^{m+n}(x)
};
CellOrbit cell_orbit(const MapModel& m, CellIndex c, double x);

// Visit every return cell on one side with both climb indices <= cap, in
// level order (m = 1..cap, n = 1..cap within a level). Shares one backward
// chain per level so the total cost stays near 2*cap^2 monotone solves.
// visit(m, n, lo, hi) receives the cell interval ends in home coordinates.
void for_each_cell(const MapModel& m, const PartitionTable& t, Side side, int cap,
                   const std::function<void(int, int, double, double)>& visit);

// First-return map to the interval between the zero crossing and 0, on
// either half. Return orbits climb the opposite branch, cross, and climb
// back; cells are indexed by the two climb lengths.
class InducedMap {
 public:
  InducedMap(const MapModel& m, const PartitionTable& t);

  const MapModel& model() const { return m_; }
  const PartitionTable& table() const { return t_; }
  Interval home(Side s) const;

  ReturnRecord first_return(double x, long cap = 100000000L) const;
  CellIndex locate_cell(double x) const;

  // one-parameter step relating consecutive entry cells on the right half:
  // conjugate of the near -1 branch through the right near-zero piece
  double phi(double x) const;

  ExpansionCheck check_expansion(int n_to, int samples_per_cell = 64) const;
  DistortionEstimate estimate_distortion(int depth, int pairs_per_cell, uint64_t seed) const;

  // minimum return-map derivative over cells with both indices <= cap
  double min_return_deriv(int cap, int samples_per_cell = 5) const;

 private:
  const MapModel& m_;
  const PartitionTable& t_;
};

}  // namespace fbm
