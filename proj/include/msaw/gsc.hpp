#pragma once

#include <cstdint>
#include <string>

namespace msaw {

// graded-sector threshold machinery: the multiplier t(n) and the two
// sup conditions it must satisfy with budget 1/(2(2r+1)).
struct GscParams {
  int r = 2;          // grading width, >= 1
  double kappa = 2.0; // diagonal growth exponent, >= 2
  double C = 0.0;     // additive constant in both bounds, >= 0
  int64_t n1_max = 200000;
  double slack = 1e-12; // non-strict comparison tolerance
};

void validate_gsc(const GscParams& p); // throws std::invalid_argument

// t(n) = n1^kappa below n1, n^kappa on [n1, n2], n2^kappa above n2
double gsc_multiplier(int64_t n, int64_t n1, int64_t n2, double kappa);

// condition values at a given cutoff n1 (upper cutoff at infinity):
//   q1 = |t(n)^2 - t(n+j)^2| / t(n)^2 * (n/(12 r^2 kappa) + C)
//   q2 = (t(n) - t(n+j))^2  / t(n)^2 * (n^2/(6 r^3 kappa^2) + C)
double gsc_q1(const GscParams& p, int64_t n1, int64_t n, int j);
double gsc_q2(const GscParams& p, int64_t n1, int64_t n, int j);

struct GscScan {
  bool ok = false;       // all scanned values within budget + slack
  bool tail_ok = false;  // closed-form certificate for n beyond the scan
  double sup_q1 = 0.0, sup_q2 = 0.0;
  int64_t arg_n_q1 = 0, arg_n_q2 = 0;
  int arg_j_q1 = 0, arg_j_q2 = 0;
  int64_t scan_end = 0;
};

// checks both conditions for all 0 <= n <= n_max, 1 <= |j| <= r, n+j >= 0,
// plus an analytic bound for the tail n > n_max
GscScan gsc_scan(const GscParams& p, int64_t n1, int64_t n_max);

struct GscReport {
  bool feasible = false;
  bool boundary = false; // plateau coincides with the budget to within slack
  int64_t n1 = 0;        // minimal feasible cutoff when feasible
  double budget = 0.0;   // 1/(2(2r+1))
  double plateau = 0.0;  // large-n limit of both condition values, 1/(6r)
  double sup_q1 = 0.0, sup_q2 = 0.0; // at the returned n1
  double margin = 0.0;   // budget + slack - max(sup_q1, sup_q2)
  int64_t scan_end = 0;
  std::string note;
};

// minimal n1 such that both conditions hold for all n (exponential probe +
// binary search, each candidate checked by direct scan to 10*n1 with a
// monotone tail certificate)
GscReport gsc_threshold(const GscParams& p);

}  // namespace msaw
