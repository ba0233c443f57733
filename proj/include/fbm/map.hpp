#pragma once
#include <stdexcept>
#include <string>

namespace fbm {

// Error taxonomy shared across the library. Every failure mode thrown by the
// library derives from Error so callers can catch one type at the boundary.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonMonotone : Error { using Error::Error; };
struct ExpansionFailure : Error { using Error::Error; };
struct RangeMismatch : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct ConvergenceFailure : Error { using Error::Error; };
struct BudgetExceeded : Error { using Error::Error; };
struct BoundaryHit : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };
struct NotFound : Error { using Error::Error; };
struct InsufficientData : Error { using Error::Error; };
struct TruncationTooSmall : Error { using Error::Error; };
struct NonConvergence : Error { using Error::Error; };

enum class Side { Left, Right };

inline const char* to_string(Side s) { return s == Side::Left ? "left" : "right"; }

// Parameters of the two-branch map on [-1,1]. Branch pieces near the fixed
// points +-1 are x -+ b*(1-+x)^(1+ell) for ell > 0, or the hyperbolic form
// with slope 1+b and quadratic correction xi_coeff*(1-+x)^2 for ell = 0.
// Pieces near 0 are 1 - a1*|x|^k1 (left) and -1 + a2*x^k2 (right); k = 1 is
// the linear case and then requires a > 1.
struct MapParams {
  double ell1 = 0, ell2 = 0;
  double k1 = 0, k2 = 0;
  double a1 = 0, a2 = 0;
  double b1 = 0, b2 = 0;
  double iota = 0.5;        // half-width of the explicit regions around 0
  double blend_width = 0.25; // fraction of each inter-region gap used to blend
  double xi_coeff1 = 1.0;   // quadratic correction coefficients, ell = 0 only
  double xi_coeff2 = 1.0;
};

struct RegimeReport {
  double beta1 = 0, beta2 = 0, beta = 0;
  bool finite_acip = false;
  std::string mixing;    // "exponential" | "polynomial" | "infinite"
  double poly_rate = 0;  // (1-beta)/beta in the polynomial regime
};

RegimeReport classify(const MapParams& p);

// Full-branch increasing map of [-1,1] with indifferent or hyperbolic fixed
// points at -1 and +1 and surjective branches on [-1,0] and [0,1].
// Construction: the four closed-form pieces are used exactly on their
// regions, extended into the gap between them, and joined over a centered
// C^2 smoothstep window inside each gap. The constructor validates
// monotonicity on a grid, locates the branch zero crossings, and certifies
// expansion of the first-entry iterates outside the explicit regions.
class MapModel {
 public:
  explicit MapModel(const MapParams& p);

  const MapParams& params() const { return p_; }       // resolved parameters
  bool iotaReduced() const { return iota_reduced_; }
  const RegimeReport& regime() const { return regime_; }

  // geometry: [-1, uL] f-piece, [wLlo, wLhi] blend, [-iota, 0] q-piece, etc.
  double iota() const { return p_.iota; }
  double uMinusEnd() const { return uL_; }    // -1 + a2*iota^k2
  double uPlusStart() const { return uR_; }   // 1 - a1*iota^k1
  double blendLo(Side branch) const { return branch == Side::Left ? wLlo_ : wRlo_; }
  double blendHi(Side branch) const { return branch == Side::Left ? wLhi_ : wRhi_; }
  double zeroCross(Side branch) const { return branch == Side::Left ? x0m_ : x0p_; }

  // expansion certificate for the first-entry iterates (cells not yet inside
  // the explicit regions around 0)
  double lambda() const { return lambda_; }
  int nMinusCert() const { return n_minus_cert_; }
  int nPlusCert() const { return n_plus_cert_; }

  double eval(double x) const;                  // x = 0 needs the side flag
  double eval(double x, Side sideAtZero) const;
  double deriv(double x, int order = 1) const;
  double deriv(double x, Side sideAtZero, int order = 1) const;
  double invert(Side branch, double y) const;   // monotone branch inverse

  // closed-form pieces, valid on their regions extended to the blend window
  double gNearMinusOne(double x) const;
  double gLeftOfZero(double x) const;
  double gRightOfZero(double x) const;
  double gNearPlusOne(double x) const;

  // dynamics in distance coordinates z = 1+x near -1 and w = 1-x near +1,
  // valid while the point stays in the outer closed-form piece
  double stepDistMinus(double z) const;       // 1 + g(-1+z)
  double stepDistPlus(double w) const;        // 1 - g(1-w)
  double derivDistMinus(double z) const;      // g'(-1+z)
  double derivDistPlus(double w) const;       // g'(1-w)
  double pullbackDistMinus(double Z) const;   // solves stepDistMinus(z) = Z
  double pullbackDistPlus(double W) const;
  double maxZLeft() const { return 1.0 + wLlo_; }   // validity cap for z
  double maxWRight() const { return 1.0 - wRhi_; }  // validity cap for w

 private:
  double evalLeft(double x) const;
  double evalRight(double x) const;
  double derivLeft(double x, int order) const;
  double derivRight(double x, int order) const;
  void checkMonotone() const;
  void certifyExpansion();

  MapParams p_;
  bool iota_reduced_ = false;
  double uL_ = 0, uR_ = 0;                  // ends of the outer regions
  double wLlo_ = 0, wLhi_ = 0;              // blend window, left branch
  double wRlo_ = 0, wRhi_ = 0;              // blend window, right branch
  double x0m_ = 0, x0p_ = 0;                // g(x0) = 0 on each branch
  double lambda_ = 0;
  int n_minus_cert_ = 0, n_plus_cert_ = 0;
  RegimeReport regime_;
};

}  // namespace fbm
