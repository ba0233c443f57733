#include "fbm/observable.hpp"

#include <cmath>
#include <utility>

namespace fbm {
namespace {

double eval_terms(const std::vector<PowerTerm>& terms, double d) {
  double s = 0;
  for (const auto& t : terms) s += t.coeff * std::pow(d, t.power);
  return s;
}

double endpoint_value(const std::vector<PowerTerm>& terms) {
  double s = 0;
  for (const auto& t : terms)
    if (t.power == 0) s += t.coeff;
  return s;
}

}  // namespace

Observable::Observable(std::string name, std::vector<PowerTerm> left,
                       std::vector<PowerTerm> right, double nu1, double nu2)
    : name_(std::move(name)), nu1_(nu1), nu2_(nu2) {
  for (const auto& t : left)
    if (t.power < 0) throw DomainError("observable powers must be >= 0");
  for (const auto& t : right)
    if (t.power < 0) throw DomainError("observable powers must be >= 0");
  at_m1_ = endpoint_value(left);
  at_p1_ = endpoint_value(right);
  f_ = [l = std::move(left), r = std::move(right)](double x) {
    return x <= 0.0 ? eval_terms(l, 1.0 + x) : eval_terms(r, 1.0 - x);
  };
  validateEndpoints();
}

Observable::Observable(std::string name, std::function<double(double)> f, double at_minus1,
                       double at_plus1, double nu1, double nu2)
    : name_(std::move(name)), f_(std::move(f)), at_m1_(at_minus1), at_p1_(at_plus1),
      nu1_(nu1), nu2_(nu2) {
  validateEndpoints();
}

void Observable::validateEndpoints() const {
  if (!(nu1_ > 0) || nu1_ > 1 || !(nu2_ > 0) || nu2_ > 1)
    throw DomainError("regularity exponents must lie in (0,1]");
  double eNear = std::abs(f_(-1.0 + 0x1p-10) - at_m1_) + std::abs(f_(1.0 - 0x1p-10) - at_p1_);
  double eFar = endpointMismatch();
  // the deviation must shrink as the grid closes in on the endpoints
  if (eFar > 1e-9 && eFar > 0.9 * eNear)
    throw RangeMismatch("declared endpoint values do not match the evaluator near +-1");
}

double Observable::endpointMismatch() const {
  return std::max(std::abs(f_(-1.0 + 0x1p-40) - at_m1_), std::abs(f_(1.0 - 0x1p-40) - at_p1_));
}

Observable vanishing_cubic() {
  return Observable("vanishing_cubic", {{-2, 1}, {3, 2}, {-1, 3}}, {{2, 1}, {-3, 2}, {1, 3}},
                    1.0, 1.0);
}

Observable affine_tilt() {
  return Observable("affine_tilt", {{0.5, 0}, {0.5, 1}}, {{1.5, 0}, {-0.5, 1}}, 1.0, 1.0);
}

Observable left_step() {
  return Observable("left_step", {{1, 0}, {-0.5, 1}}, {{0.5, 1}}, 1.0, 1.0);
}

Observable step_pair(double a, double b) {
  return Observable("step_pair", {{b, 0}}, {{a, 0}}, 1.0, 1.0);
}

Observable coboundary(const MapModel& m) {
  auto chi = [](double x) { return 0.25 * x * x; };
  auto f = [mm = m, chi](double x) {
    double gx = x <= 0.0 ? mm.eval(x, Side::Left) : mm.eval(x, Side::Right);
    return chi(gx) - chi(x);
  };
  return Observable("coboundary", f, 0.0, 0.0, 1.0, 1.0);
}

double beta_phi(const Observable& obs, const RegimeReport& reg) {
  bool am = obs.atMinus1() != 0.0, ap = obs.atPlus1() != 0.0;
  if (!am && !ap) return 0.0;
  if (am && ap) return reg.beta;
  return am ? reg.beta1 : reg.beta2;
}

HolderCheck holder_conditions(const Observable& obs, const MapParams& p,
                              const RegimeReport& reg) {
  HolderCheck h;
  h.beta_phi = beta_phi(obs, reg);
  h.basic = obs.nu1() > (reg.beta1 - 0.5) / p.k2 && obs.nu2() > (reg.beta2 - 0.5) / p.k1;
  h.refined = obs.nu1() > (reg.beta1 - h.beta_phi) / p.k2 &&
              obs.nu2() > (reg.beta2 - h.beta_phi) / p.k1;
  return h;
}

}  // namespace fbm
