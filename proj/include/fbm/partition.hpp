#pragma once
#include <Eigen/Dense>
#include <utility>

#include "fbm/map.hpp"

namespace fbm {

// Boundary tables of the level sets around the fixed points and around 0.
// Stored in distance coordinates to keep relative precision deep in the
// tails: zm[n] = 1 + x_n^- and wp[n] = 1 - x_n^+ (both decreasing to 0),
// ym[n] = |y_n^-| and yp[n] = y_n^+ (decreasing to 0). The x sequences pull
// back toward the fixed points, the y sequences index the first-entry cells
// of the region around 0.
struct PartitionTable {
  int n_max = 0;  // effective table depth (may be truncated on underflow)
  Eigen::ArrayXd zm, wp, ym, yp;
  int n_minus = 0, n_plus = 0;  // first indices with cells inside the explicit regions
  bool truncated = false;

  double xMinus(int n) const { return zm(check(n)) - 1.0; }
  double xPlus(int n) const { return 1.0 - wp(check(n)); }
  double yMinus(int n) const { return -ym(check(n)); }
  double yPlus(int n) const { return yp(check(n)); }
  double deltaMinus(int n) const { return zm(checkPos(n) - 1) - zm(n); }   // |interval n| near -1
  double deltaPlus(int n) const { return wp(checkPos(n) - 1) - wp(n); }
  double sdeltaMinus(int n) const { return ym(checkPos(n) - 1) - ym(n); }  // |cell n| left of 0
  double sdeltaPlus(int n) const { return yp(checkPos(n) - 1) - yp(n); }

 private:
  int check(int n) const {
    if (n < 0 || n > n_max) throw IndexOutOfRange("partition index out of table range");
    return n;
  }
  int checkPos(int n) const {
    if (n < 1 || n > n_max) throw IndexOutOfRange("partition index out of table range");
    return n;
  }
};

PartitionTable compute_boundaries(const MapModel& m, int n_max);

// (n_minus, n_plus): smallest cell indices fully inside the explicit regions,
// zero when the whole domain interval already is
std::pair<int, int> n_plus_minus(const PartitionTable& t);

struct CellIndex {
  int m = 0, n = 0;
  Side side = Side::Left;
};

struct Interval {
  double lo = 0, hi = 0;
  double width() const { return hi - lo; }
};

// Endpoints of the return cell with indices (m, n): points whose excursion
// spends m iterates on the opposite half before landing in the n-th entry
// cell of its own half. Cost is O(m) branch inversions.
Interval cell_interval(const MapModel& m, const PartitionTable& t, CellIndex c);

enum class SeriesKind {
  XMinusDist,       // 1 + x_n^-
  XPlusDist,        // 1 - x_n^+
  YMinusAbs,        // |y_n^-|
  YPlusAbs,         // y_n^+
  DeltaMinus,       // |interval_n^-|
  DeltaPlus,        // |interval_n^+|
  SmallDeltaMinus,  // |cell_n^-|
  SmallDeltaPlus,   // |cell_n^+|
};

// Tail fit of one boundary series over the last decade of indices, with the
// predicted exponent/constant (power regime) or per-step rate (exponential
// regime, when the governing branch exponent ell is zero).
struct FitReport {
  SeriesKind series = SeriesKind::XMinusDist;
  bool power_law = true;
  int n_lo = 0, n_hi = 0;
  double exponent_fit = 0, constant_fit = 0, r_squared = 0;
  double exponent_theory = 0, constant_theory = 0;
  double rate_fit = 0, rate_theory = 0;  // exponential regime
  double bracket_hi = 0;                 // sup of s_n * exp(rate_theory * n)
};

FitReport fit_asymptotics(const MapModel& m, const PartitionTable& t, SeriesKind s);

}  // namespace fbm
