#include "msaw/rate.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace msaw {

Poly RateSpec::w_poly() const {
  Poly g(std::vector<double>{gamma});
  return g + s + r;
}

Poly RateSpec::potential() const { return r.antiderivative(); }
Poly RateSpec::s_antiderivative() const { return s.antiderivative(); }
Poly RateSpec::w_antiderivative() const { return w_poly().antiderivative(); }

bool RateSpec::is_linear_r() const {
  return r.degree() == 1 && r.coeff(0) == 0.0;
}

bool RateSpec::interaction_free() const { return r.is_zero() && s.is_zero(); }

RateSpec RateSpec::doubled_potential() const {
  RateSpec out = *this;
  out.r = r.scaled(2.0);
  out.c = 2.0 * c;
  return out;
}

RateSpec RateSpec::constant(double gamma) {
  RateSpec out;
  out.gamma = gamma;
  out.c = 1.0;  // placeholder, validate() rejects this spec anyway
  return out;
}

RateSpec RateSpec::quartic_reference() {
  // min of u^4 + u sits at u* = -4^{-1/3}; s0 = -(u*^4 + u*) = 3/(4 * 4^{1/3})
  const double s0 = 3.0 / (4.0 * std::cbrt(4.0));
  RateSpec out;
  out.gamma = 1.0;
  out.c = 1.0;
  out.r = Poly({0.0, 1.0});
  out.s = Poly({s0, 0.0, 0.0, 0.0, 1.0});
  return out;
}

RateSpec RateSpec::cubic_reference() {
  RateSpec out;
  out.gamma = 1.0;
  out.c = 1.0;
  out.r = Poly({0.0, 1.0, 0.0, 1.0});
  out.s = Poly({1.0, 0.0, 0.0, 0.0, 1.0});
  return out;
}

namespace {

void fail(RateValidation& v, const std::string& msg) { v.failures.push_back(msg); }

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

}  // namespace

RateValidation validate(const RateSpec& spec) {
  RateValidation v;

  // finiteness
  v.finite_ok = std::isfinite(spec.gamma) && std::isfinite(spec.c);
  for (double ck : spec.r.coeffs())
    if (!std::isfinite(ck)) v.finite_ok = false;
  for (double ck : spec.s.coeffs())
    if (!std::isfinite(ck)) v.finite_ok = false;
  if (!v.finite_ok) fail(v, "non-finite coefficient or parameter");

  // strict positivity of the floor rate and the convexity constant
  v.positive_ok = spec.gamma > 0.0 && spec.c > 0.0;
  if (spec.gamma <= 0.0) fail(v, "floor rate gamma must be > 0, got " + fmt(spec.gamma));
  if (spec.c <= 0.0) fail(v, "convexity constant c must be > 0, got " + fmt(spec.c));

  // parity is a coefficient-level requirement, not a sampled one
  v.parity_ok = true;
  for (size_t k = 0; k < spec.r.coeffs().size(); k += 2)
    if (std::fabs(spec.r.coeff(k)) > 1e-12) {
      v.parity_ok = false;
      fail(v, "r must be odd: nonzero coefficient at even power " + std::to_string(k));
    }
  for (size_t k = 1; k < spec.s.coeffs().size(); k += 2)
    if (std::fabs(spec.s.coeff(k)) > 1e-12) {
      v.parity_ok = false;
      fail(v, "s must be even: nonzero coefficient at odd power " + std::to_string(k));
    }

  if (!v.finite_ok) return v;

  // grid scan on [-50, 50]: excess q = s + r (so w = gamma + q) and r'
  const Poly q = spec.s + spec.r;
  const Poly rp = spec.r.derivative();
  const double lo = -50.0, hi = 50.0, step = 1e-3;
  double min_q = std::numeric_limits<double>::infinity();
  double arg_q = 0.0;
  double min_rp = std::numeric_limits<double>::infinity();
  for (double u = lo; u <= hi + 0.5 * step; u += step) {
    const double qu = q(u);
    if (qu < min_q) {
      min_q = qu;
      arg_q = u;
    }
    const double rpu = rp(u);
    if (rpu < min_rp) min_rp = rpu;
  }
  if (q.is_zero()) min_q = 0.0;
  if (rp.is_zero()) min_rp = 0.0;
  v.min_excess = min_q;
  v.argmin_excess = arg_q;
  v.min_r_prime = min_rp;

  v.ellipticity_ok = min_q >= -1e-9;
  if (!v.ellipticity_ok)
    fail(v, "w dips below gamma: min(s+r) = " + fmt(min_q) + " at u = " + fmt(arg_q));
  v.floor_matches_gamma = v.ellipticity_ok && std::fabs(min_q) <= 1e-6;
  if (v.ellipticity_ok && !v.floor_matches_gamma)
    fail(v, "gamma is not the infimum of w: min(s+r) = " + fmt(min_q) + " > 0");

  v.convexity_ok = min_rp >= spec.c - 1e-9;
  if (!v.convexity_ok)
    fail(v, "r' dips below c: min r' = " + fmt(min_rp) + " < c = " + fmt(spec.c));

  // tail behaviour beyond the grid: leading coefficients decide the limits.
  // q -> +inf needs even degree with positive leading term (or q constant >= 0);
  // r' (an even polynomial) stays >= c at infinity iff its leading term is
  // positive or r is exactly linear.
  v.tail_ok = true;
  if (q.degree() >= 1) {
    if (q.degree() % 2 != 0 || q.leading() <= 0.0) {
      v.tail_ok = false;
      fail(v, "s + r does not stay nonnegative at infinity (leading term)");
    }
  }
  if (rp.degree() >= 1 && rp.leading() <= 0.0) {
    v.tail_ok = false;
    fail(v, "r' does not stay >= c at infinity (leading term)");
  }

  // diagnostic: entire-function growth control sum_k (2/c)^{k/2} k! |r_k|
  if (spec.c > 0.0) {
    double sum = 0.0, factorial = 1.0;
    for (size_t k = 0; k < spec.r.coeffs().size(); ++k) {
      if (k > 0) factorial *= double(k);
      sum += std::pow(2.0 / spec.c, 0.5 * double(k)) * factorial *
             std::fabs(spec.r.coeff(k));
    }
    v.entire_series_sum = sum;
  }

  v.ok = v.finite_ok && v.positive_ok && v.parity_ok && v.ellipticity_ok &&
         v.floor_matches_gamma && v.convexity_ok && v.tail_ok;
  return v;
}

}  // namespace msaw
