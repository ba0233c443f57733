#pragma once
#include <Eigen/Dense>

#include "fbm/induced.hpp"

namespace fbm {

struct UlamOptions {
  int bins = 2048;
  int cell_cap = 400;        // truncation of both cell indices
  double escape_tol = 0.01;  // max Lebesgue fraction lost to the truncation
  int max_iters = 100000;
  double tol = 1e-12;        // L1 fixed-point residual
  int fit_bins = 16;         // bins in the endpoint density fit
};

struct UlamResult {
  Side side = Side::Left;
  int bins = 0, cell_cap = 0;
  double lo = 0, hi = 0;  // home interval
  Eigen::ArrayXd mass;    // stationary bin masses, sum 1
  Eigen::ArrayXd density; // mass / bin width
  double escape = 0;      // Lebesgue fraction of home not covered by enumerated cells
  double residual = 0;
  int iters = 0;
  double density_at_zero = 0;  // linear extrapolation of the bins nearest 0

  double bin_width() const { return (hi - lo) / bins; }
  double center(int i) const { return lo + (i + 0.5) * bin_width(); }
};

// Transfer-operator discretization of the first-return map on one home
// interval: bin-to-bin transition fractions assembled cell by cell, then the
// stationary vector by fixed-point iteration.
UlamResult ulam_density(const MapModel& m, const PartitionTable& t, Side side,
                        const UlamOptions& opt = {});

// piecewise-linear read of the binned density; the zero end interpolates
// toward the fitted endpoint value, the far end clamps
double density_at(const UlamResult& u, double x);

}  // namespace fbm
