#include "msaw/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace msaw {

MeanVar mean_var(const std::vector<double>& xs) {
  MeanVar out;
  out.n = int64_t(xs.size());
  if (out.n == 0) return out;
  KahanSum s;
  for (double x : xs) s.add(x);
  out.mean = s.value() / double(out.n);
  if (out.n >= 2) {
    KahanSum q;
    for (double x : xs) q.add((x - out.mean) * (x - out.mean));
    out.var = q.value() / double(out.n - 1);
    out.se = std::sqrt(out.var / double(out.n));
  }
  return out;
}

JackknifeResult jackknife(const std::vector<std::vector<double>>& rows,
                          const std::function<double(const std::vector<double>&)>& f) {
  JackknifeResult out;
  const int64_t n = int64_t(rows.size());
  out.n = n;
  if (n == 0) return out;
  const size_t m = rows[0].size();
  std::vector<KahanSum> sums(m);
  for (const auto& row : rows) {
    if (row.size() != m) throw std::invalid_argument("jackknife: ragged ingredient rows");
    for (size_t jx = 0; jx < m; ++jx) sums[jx].add(row[jx]);
  }
  std::vector<double> total(m), means(m);
  for (size_t jx = 0; jx < m; ++jx) {
    total[jx] = sums[jx].value();
    means[jx] = total[jx] / double(n);
  }
  out.value = f(means);
  if (n < 2) return out;
  std::vector<double> loo(m);
  std::vector<double> theta(static_cast<size_t>(n));
  KahanSum tsum;
  for (int64_t i = 0; i < n; ++i) {
    for (size_t jx = 0; jx < m; ++jx)
      loo[jx] = (total[jx] - rows[size_t(i)][jx]) / double(n - 1);
    theta[size_t(i)] = f(loo);
    tsum.add(theta[size_t(i)]);
  }
  const double tbar = tsum.value() / double(n);
  KahanSum q;
  for (double th : theta) q.add((th - tbar) * (th - tbar));
  out.se = std::sqrt(q.value() * double(n - 1) / double(n));
  return out;
}

namespace {

// asymptotic Kolmogorov tail Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2)
double kolmogorov_tail(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * double(k) * double(k) * lambda * lambda);
    sum += term;
    if (std::fabs(term) < 1e-12) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

KsResult ks_test_exponential(std::vector<double> samples, double rate) {
  KsResult out;
  out.n = int64_t(samples.size());
  if (out.n == 0 || rate <= 0.0) throw std::invalid_argument("ks_test_exponential: bad input");
  std::sort(samples.begin(), samples.end());
  const double n = double(out.n);
  double d = 0.0;
  for (int64_t i = 0; i < out.n; ++i) {
    const double cdf = -std::expm1(-rate * samples[size_t(i)]);
    d = std::max(d, std::fabs(cdf - double(i) / n));
    d = std::max(d, std::fabs(double(i + 1) / n - cdf));
  }
  out.d_stat = d;
  const double rn = std::sqrt(n);
  out.p_value = kolmogorov_tail((rn + 0.12 + 0.11 / rn) * d);
  return out;
}

KsResult ks_test_two_sample(std::vector<double> a, std::vector<double> b) {
  KsResult out;
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_test_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = double(a.size()), nb = double(b.size());
  size_t ia = 0, ib = 0;
  double d = 0.0;
  while (ia < a.size() && ib < b.size()) {
    const double x = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] <= x) ++ia;
    while (ib < b.size() && b[ib] <= x) ++ib;
    d = std::max(d, std::fabs(double(ia) / na - double(ib) / nb));
  }
  out.d_stat = d;
  out.n = int64_t(a.size() + b.size());
  const double ne = std::sqrt(na * nb / (na + nb));
  out.p_value = kolmogorov_tail((ne + 0.12 + 0.11 / ne) * d);
  return out;
}

AdResult anderson_darling_normal(std::vector<double> samples) {
  AdResult out;
  const int64_t n = int64_t(samples.size());
  if (n < 8) throw std::invalid_argument("anderson_darling_normal: need at least 8 samples");
  const MeanVar mv = mean_var(samples);
  if (mv.var <= 0.0) throw std::invalid_argument("anderson_darling_normal: degenerate sample");
  const double sd = std::sqrt(mv.var);
  std::sort(samples.begin(), samples.end());
  KahanSum acc;
  for (int64_t i = 0; i < n; ++i) {
    const double zi = (samples[size_t(i)] - mv.mean) / sd;
    const double zr = (samples[size_t(n - 1 - i)] - mv.mean) / sd;
    const double lo = std::log(std::max(std_normal_cdf(zi), 1e-300));
    const double hi = std::log(std::max(1.0 - std_normal_cdf(zr), 1e-300));
    acc.add(double(2 * i + 1) * (lo + hi));
  }
  const double a2 = -double(n) - acc.value() / double(n);
  const double a2s = a2 * (1.0 + 0.75 / double(n) + 2.25 / double(n * n));
  out.a2_star = a2s;
  // stephens' case-3 p-value fit
  double p;
  if (a2s >= 0.6)
    p = std::exp(1.2937 - 5.709 * a2s + 0.0186 * a2s * a2s);
  else if (a2s > 0.34)
    p = std::exp(0.9177 - 4.279 * a2s - 1.38 * a2s * a2s);
  else if (a2s > 0.2)
    p = 1.0 - std::exp(-8.318 + 42.796 * a2s - 59.938 * a2s * a2s);
  else
    p = 1.0 - std::exp(-13.436 + 101.14 * a2s - 223.73 * a2s * a2s);
  out.p_value = std::clamp(p, 0.0, 1.0);
  return out;
}

}  // namespace msaw
