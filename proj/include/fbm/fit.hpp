#pragma once
#include <vector>

namespace fbm {

struct LinFit {
  double slope = 0, intercept = 0, r_squared = 0;
  int n = 0;
};

// ordinary least squares y = intercept + slope * x
LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

double normal_cdf(double x);

// Kolmogorov-Smirnov distance of a sample to N(mean, sd^2); sorts a copy
double ks_to_normal(std::vector<double> vals, double mean, double sd);

// Hill estimator of the tail index on the largest (upper) or smallest
// (lower, sign-flipped) fraction of the sample
double hill_tail_index(std::vector<double> vals, double tail_fraction, bool upper = true);

}  // namespace fbm
