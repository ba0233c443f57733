#pragma once
#include "fbm/map.hpp"

// parameter sets shared across the test binaries

inline fbm::MapParams pstar() {
  fbm::MapParams p;
  p.ell1 = p.ell2 = 0.5;
  p.k1 = p.k2 = 1.5;
  p.a1 = p.a2 = 1.0;
  p.b1 = p.b2 = 1.0;
  return p;
}

// doubling map in disguise: every branch piece is the same line of slope 2,
// so the invariant density, the return tails, and the Lyapunov exponent all
// have closed forms
inline fbm::MapParams affine() {
  fbm::MapParams p;
  p.ell1 = p.ell2 = 0.0;
  p.k1 = p.k2 = 1.0;
  p.a1 = p.a2 = 2.0;
  p.b1 = p.b2 = 1.0;
  p.iota = 0.25;
  p.xi_coeff1 = p.xi_coeff2 = 0.0;
  return p;
}

inline fbm::MapParams beta(double ell) {
  fbm::MapParams p = pstar();
  p.ell1 = p.ell2 = ell;
  return p;
}
