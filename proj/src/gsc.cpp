#include "msaw/gsc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace msaw {

void validate_gsc(const GscParams& p) {
  if (p.r < 1) throw std::invalid_argument("gsc: grading width r must be >= 1");
  if (!(p.kappa >= 2.0)) throw std::invalid_argument("gsc: kappa must be >= 2");
  if (!(p.C >= 0.0)) throw std::invalid_argument("gsc: C must be >= 0");
  if (p.n1_max < 1) throw std::invalid_argument("gsc: n1_max must be >= 1");
}

double gsc_multiplier(int64_t n, int64_t n1, int64_t n2, double kappa) {
  if (n < 0) throw std::invalid_argument("gsc_multiplier: negative sector");
  if (!(0 < n1 && n1 < n2)) throw std::invalid_argument("gsc_multiplier: need 0 < n1 < n2");
  const int64_t m = std::clamp(n, n1, n2);
  return std::pow(double(m), kappa);
}

namespace {

// log(t(n+j)/t(n)) with the lower cutoff at n1 and no upper cutoff,
// computed via log1p so that huge powers never cancel
double log_ratio(int64_t n1, int64_t n, int j, double kappa) {
  const int64_t m1 = std::max(n, n1);
  const int64_t m2 = std::max(n + int64_t(j), n1);
  return kappa * std::log1p(double(m2 - m1) / double(m1));
}

double budget_of(int r) { return 1.0 / (2.0 * (2.0 * double(r) + 1.0)); }

}  // namespace

double gsc_q1(const GscParams& p, int64_t n1, int64_t n, int j) {
  if (n + int64_t(j) < 0) return 0.0;
  const double lr = log_ratio(n1, n, j, p.kappa);
  const double ratio = std::fabs(std::expm1(2.0 * lr));
  return ratio * (double(n) / (12.0 * double(p.r) * double(p.r) * p.kappa) + p.C);
}

double gsc_q2(const GscParams& p, int64_t n1, int64_t n, int j) {
  if (n + int64_t(j) < 0) return 0.0;
  const double lr = log_ratio(n1, n, j, p.kappa);
  const double dr = std::expm1(lr);
  const double r3 = double(p.r) * double(p.r) * double(p.r);
  return dr * dr * (double(n) * double(n) / (6.0 * r3 * p.kappa * p.kappa) + p.C);
}

GscScan gsc_scan(const GscParams& p, int64_t n1, int64_t n_max) {
  validate_gsc(p);
  if (n1 < 1) throw std::invalid_argument("gsc_scan: n1 must be >= 1");
  GscScan sc;
  sc.scan_end = n_max;
  const double limit = budget_of(p.r) + p.slack;
  // below n1 - r both endpoints sit on the flat part and every ratio vanishes
  const int64_t lo = std::max<int64_t>(0, n1 - int64_t(p.r));
  for (int64_t n = lo; n <= n_max; ++n) {
    for (int j = -p.r; j <= p.r; ++j) {
      if (j == 0 || n + int64_t(j) < 0) continue;
      const double q1 = gsc_q1(p, n1, n, j);
      const double q2 = gsc_q2(p, n1, n, j);
      if (q1 > sc.sup_q1) {
        sc.sup_q1 = q1;
        sc.arg_n_q1 = n;
        sc.arg_j_q1 = j;
      }
      if (q2 > sc.sup_q2) {
        sc.sup_q2 = q2;
        sc.arg_n_q2 = n;
        sc.arg_j_q2 = j;
      }
    }
  }
  sc.ok = sc.sup_q1 <= limit && sc.sup_q2 <= limit;
  // tail n > n_max >= n1: pure power regime.
  //  j > 0: both condition values decrease in n, so the scanned endpoint
  //         dominates the tail.
  //  j < 0: the ratio parts increase toward the plateau |j|/(6 r^2) resp.
  //         j^2/(6 r^3) while the C parts obey |t ratio - 1| <= 2 kappa |j| / n.
  sc.tail_ok = true;
  const double nd = double(n_max);
  for (int j = 1; j <= p.r; ++j) {
    const double jd = double(j);
    const double tail1 =
        jd / (6.0 * double(p.r) * double(p.r)) + 2.0 * p.kappa * jd * p.C / nd;
    const double tail2 = jd * jd / (6.0 * double(p.r) * double(p.r) * double(p.r)) +
                         p.kappa * p.kappa * jd * jd * p.C / (nd * nd);
    if (tail1 > limit || tail2 > limit) sc.tail_ok = false;
  }
  return sc;
}

GscReport gsc_threshold(const GscParams& p) {
  validate_gsc(p);
  GscReport rep;
  rep.budget = budget_of(p.r);
  rep.plateau = 1.0 / (6.0 * double(p.r));
  rep.boundary = std::fabs(rep.plateau - rep.budget) <= p.slack;
  char buf[256];
  if (rep.plateau > rep.budget + p.slack) {
    std::snprintf(buf, sizeof(buf),
                  "infeasible: limiting ratio 1/(6r) = %.17g exceeds budget 1/(2(2r+1)) = %.17g",
                  rep.plateau, rep.budget);
    rep.note = buf;
    rep.margin = rep.budget + p.slack - rep.plateau;
    return rep;
  }
  auto check = [&](int64_t n1) { return gsc_scan(p, n1, 10 * n1 + int64_t(p.r)); };
  // feasibility is monotone in n1: the dominating value sits at the entry of
  // the power regime and shrinks as the regime moves right
  int64_t hi = 1;
  GscScan sc_hi = check(hi);
  auto pass = [](const GscScan& s) { return s.ok && s.tail_ok; };
  while (!pass(sc_hi) && hi < p.n1_max) {
    hi = std::min(hi * 2, p.n1_max);
    sc_hi = check(hi);
  }
  if (!pass(sc_hi)) {
    rep.sup_q1 = sc_hi.sup_q1;
    rep.sup_q2 = sc_hi.sup_q2;
    rep.margin = rep.budget + p.slack - std::max(sc_hi.sup_q1, sc_hi.sup_q2);
    rep.scan_end = sc_hi.scan_end;
    std::snprintf(buf, sizeof(buf),
                  "infeasible: no n1 <= %lld satisfies both conditions; limiting ratio %.17g "
                  "vs budget %.17g, worst value %.17g at n1 = %lld",
                  (long long)p.n1_max, rep.plateau, rep.budget,
                  std::max(sc_hi.sup_q1, sc_hi.sup_q2), (long long)hi);
    rep.note = buf;
    return rep;
  }
  int64_t lo = hi / 2; // known infeasible (or 0 when hi == 1)
  while (lo + 1 < hi) {
    const int64_t mid = lo + (hi - lo) / 2;
    if (pass(check(mid)))
      hi = mid;
    else
      lo = mid;
  }
  const GscScan fin = check(hi);
  rep.feasible = true;
  rep.n1 = hi;
  rep.sup_q1 = fin.sup_q1;
  rep.sup_q2 = fin.sup_q2;
  rep.margin = rep.budget + p.slack - std::max(fin.sup_q1, fin.sup_q2);
  rep.scan_end = fin.scan_end;
  std::snprintf(buf, sizeof(buf), "minimal n1 = %lld, margin %.3e%s", (long long)hi, rep.margin,
                rep.boundary ? " (plateau sits on the budget)" : "");
  rep.note = buf;
  return rep;
}

}  // namespace msaw
