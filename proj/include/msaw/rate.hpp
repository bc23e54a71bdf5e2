#pragma once
// jump-rate model for the walk: w(u) = gamma + s(u) + r(u) where u is the
// local-time gradient seen by the walker. gamma is the uniform floor rate,
// s is the even part (>= 0 together with r - gamma ... see validate()), and
// r is the odd increasing part: r'(u) >= c > 0. the interaction potential is
// R(u) = int_0^u r(v) dv, an even strictly convex polynomial.

#include <string>
#include <vector>

#include "msaw/poly.hpp"

namespace msaw {

struct RateSpec {
  double gamma = 0.0;  // floor rate, inf_u w(u)
  double c = 0.0;      // uniform convexity: r'(u) >= c on the whole line
  Poly r;              // odd polynomial part
  Poly s;              // even polynomial part

  double w(double u) const { return gamma + s(u) + r(u); }
  Poly w_poly() const;             // gamma + s + r
  Poly potential() const;          // R = antiderivative of r
  Poly s_antiderivative() const;   // S = antiderivative of s
  Poly w_antiderivative() const;   // W = gamma*u + S(u) + R(u)

  bool is_linear_r() const;        // r(u) == a*u, a > 0: gaussian potential
  bool interaction_free() const;   // r == 0 and s == 0: constant-rate walk

  // same gamma/s but r and c doubled: gibbs weight of the environment's
  // stationary law (time reversal pairs each directed edge twice).
  RateSpec doubled_potential() const;

  // w == gamma reference mode (fails validate() by construction: no convexity)
  static RateSpec constant(double gamma);
  // gamma=1, c=1, r(u)=u, s(u)=u^4 + s0 with s0 = -min(u^4 + u) so inf w = gamma
  static RateSpec quartic_reference();
  // gamma=1, c=1, r(u)=u+u^3, s(u)=u^4+1; min(s+r) = 0 attained at u=-1
  static RateSpec cubic_reference();
};

struct RateValidation {
  bool ok = false;
  bool finite_ok = false;
  bool positive_ok = false;      // gamma > 0 and c > 0
  bool parity_ok = false;        // r odd, s even (coefficient-exact)
  bool ellipticity_ok = false;   // min_u (s+r) >= -1e-9, so inf w = gamma
  bool floor_matches_gamma = false;  // |min (s+r)| <= 1e-6: gamma is attained
  bool convexity_ok = false;     // min_u r'(u) >= c - 1e-9
  bool tail_ok = false;          // leading terms keep both properties at infinity

  double min_excess = 0.0;       // grid min of s + r
  double argmin_excess = 0.0;
  double min_r_prime = 0.0;      // grid min of r'
  double entire_series_sum = 0.0;  // sum_k (2/c)^{k/2} k! |r_k| (finite: polynomial)
  std::vector<std::string> failures;  // human-readable reasons, empty iff ok
};

RateValidation validate(const RateSpec& spec);

}  // namespace msaw
