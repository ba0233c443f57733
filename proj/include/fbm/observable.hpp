#pragma once
#include <functional>
#include <string>
#include <vector>

#include "fbm/map.hpp"

namespace fbm {

// one term c * d^p in the distance from an endpoint
struct PowerTerm {
  double coeff = 0, power = 0;
};

// observable on [-1,1], regular on each closed half separately; the two
// halves may disagree at 0. Endpoint values and the regularity exponents
// drive the limit classification, so they are part of the type and are
// checked against the evaluator on a grid approaching the endpoints.
class Observable {
 public:
  // piecewise power sums in u = 1+x on [-1,0] and v = 1-x on (0,1]
  Observable(std::string name, std::vector<PowerTerm> left, std::vector<PowerTerm> right,
             double nu1, double nu2);
  // free-form evaluator with declared endpoint values
  Observable(std::string name, std::function<double(double)> f, double at_minus1,
             double at_plus1, double nu1, double nu2);

  double operator()(double x) const { return f_(x); }
  const std::string& name() const { return name_; }
  double atMinus1() const { return at_m1_; }
  double atPlus1() const { return at_p1_; }
  double nu1() const { return nu1_; }
  double nu2() const { return nu2_; }

  // worst deviation of the evaluator from the declared endpoint values at
  // distance 2^-40; the constructor rejects values that fail to approach
  double endpointMismatch() const;

 private:
  void validateEndpoints() const;

  std::string name_;
  std::function<double(double)> f_;
  double at_m1_ = 0, at_p1_ = 0;
  double nu1_ = 1, nu2_ = 1;
};

// named examples used across the tools and tests
Observable vanishing_cubic();                        // x (1 - x^2), zero at both ends
Observable affine_tilt();                            // 1 + x/2, nonzero at both ends
Observable left_step();                              // (1 - x)/2, nonzero at -1 only
Observable step_pair(double a, double b);            // a on (0,1], b on [-1,0]
Observable coboundary(const MapModel& m);            // chi(g x) - chi(x), chi = x^2/4

// tail weight the observable inherits from the endpoint it activates
double beta_phi(const Observable& obs, const RegimeReport& reg);

// regularity margins for the distributional limits: the basic condition
// compares each exponent against (beta_i - 1/2) / k of the opposite piece,
// the refined one against (beta_i - beta_phi) / k
struct HolderCheck {
  bool basic = false;
  bool refined = false;
  double beta_phi = 0;
};
HolderCheck holder_conditions(const Observable& obs, const MapParams& p, const RegimeReport& reg);

}  // namespace fbm
