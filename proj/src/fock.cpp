#include "msaw/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "msaw/rng.hpp"
#include "msaw/stats.hpp"

namespace msaw {

double SectorBasis::mode_weight(const SpectralCache& cache, int64_t k) {
  return 1.0 / (4.0 * cache.dhat[size_t(k)] * double(cache.torus.volume()));
}

double SectorBasis::count_estimate(int64_t modes, int n) {
  double c = 1.0;
  for (int i = 1; i <= n; ++i) c *= double(modes - 1 + i) / double(i);
  return c;
}

SectorBasis::SectorBasis(const SpectralCache& cache, int n, int64_t size_limit)
    : cache_(&cache), n_(n) {
  if (n < 0) throw std::invalid_argument("sector basis: negative sector");
  const Torus& t = cache.torus;
  const int64_t modes = t.volume() - 1;
  const double est = count_estimate(modes, n);
  if (est > double(size_limit))
    throw std::length_error("sector basis too large: ~" + std::to_string(int64_t(est)) +
                            " multisets exceed limit " + std::to_string(size_limit));
  const int d = t.d;
  if (n == 0) {
    size_ = 1;
    reps_.assign(1, 0);
    weight_.assign(1, 1.0);
    ksum_.assign(size_t(d), 0);
    dhat_total_.assign(1, 0.0);
    return;
  }
  std::vector<int32_t> cur(size_t(n), 1);
  std::vector<double> log_unused;
  int kc[kMaxDim];
  const double two_pi = 2.0 * std::numbers::pi;
  double factorial_n = 1.0;
  for (int i = 2; i <= n; ++i) factorial_n *= double(i);
  while (true) {
    reps_.insert(reps_.end(), cur.begin(), cur.end());
    // multiplicity n! / prod(run lengths!)
    double denom = 1.0;
    int run = 1;
    for (int i = 1; i < n; ++i) {
      if (cur[size_t(i)] == cur[size_t(i - 1)]) {
        ++run;
        denom *= double(run);
      } else {
        run = 1;
      }
    }
    double wprod = 1.0;
    int ks[kMaxDim] = {0, 0, 0, 0};
    for (int i = 0; i < n; ++i) {
      wprod *= mode_weight(cache, cur[size_t(i)]);
      t.coords(cur[size_t(i)], kc);
      for (int a = 0; a < d; ++a) ks[a] = (ks[a] + kc[a]) % t.L;
    }
    weight_.push_back(factorial_n / denom * wprod);
    double dh = 0.0;
    for (int a = 0; a < d; ++a) {
      ksum_.push_back(int32_t(ks[a]));
      dh += 1.0 - std::cos(two_pi * double(ks[a]) / double(t.L));
    }
    dhat_total_.push_back(dh);
    // next multiset in lexicographic order
    int i = n - 1;
    while (i >= 0 && cur[size_t(i)] == int32_t(modes)) --i;
    if (i < 0) break;
    ++cur[size_t(i)];
    for (int j = i + 1; j < n; ++j) cur[size_t(j)] = cur[size_t(i)];
  }
  size_ = int64_t(weight_.size());
}

int64_t SectorBasis::find(const int32_t* sorted_multiset) const {
  if (n_ == 0) return 0;
  int64_t lo = 0, hi = size_;
  while (lo < hi) {
    const int64_t mid = lo + (hi - lo) / 2;
    const int32_t* r = rep(mid);
    int cmp = 0;
    for (int i = 0; i < n_; ++i) {
      if (r[i] != sorted_multiset[i]) {
        cmp = (r[i] < sorted_multiset[i]) ? -1 : 1;
        break;
      }
    }
    if (cmp < 0)
      lo = mid + 1;
    else if (cmp > 0)
      hi = mid;
    else
      return mid;
  }
  return -1;
}

const SectorBasis& SectorFamily::sector(int n) {
  auto it = bases_.find(n);
  if (it == bases_.end())
    it = bases_.emplace(n, std::make_unique<SectorBasis>(*cache_, n, limit_)).first;
  return *it->second;
}

GradedVector gv_zero(const SectorBasis& b) {
  GradedVector v;
  v.basis = &b;
  v.coef.assign(size_t(b.size()), cplx(0.0, 0.0));
  return v;
}

GradedVector gv_random(const SectorBasis& b, uint64_t seed) {
  GradedVector v = gv_zero(b);
  Rng rng(seed);
  for (auto& z : v.coef) z = cplx(rng.normal(), rng.normal());
  const double nrm = gv_norm(v);
  if (nrm == 0.0) throw std::runtime_error("gv_random: degenerate draw");
  gv_scale(v, cplx(1.0 / nrm, 0.0));
  return v;
}

cplx gv_inner(const GradedVector& a, const GradedVector& b) {
  if (a.basis != b.basis) throw std::invalid_argument("gv_inner: sector mismatch");
  KahanSum re, im;
  for (int64_t i = 0; i < a.basis->size(); ++i) {
    const cplx p = std::conj(a.coef[size_t(i)]) * b.coef[size_t(i)] * a.basis->weight(i);
    re.add(p.real());
    im.add(p.imag());
  }
  return {re.value(), im.value()};
}

double gv_norm(const GradedVector& a) {
  KahanSum s;
  for (int64_t i = 0; i < a.basis->size(); ++i)
    s.add(std::norm(a.coef[size_t(i)]) * a.basis->weight(i));
  return std::sqrt(s.value());
}

void gv_axpy(GradedVector& y, cplx alpha, const GradedVector& x) {
  if (y.basis != x.basis) throw std::invalid_argument("gv_axpy: sector mismatch");
  for (size_t i = 0; i < y.coef.size(); ++i) y.coef[i] += alpha * x.coef[i];
}

void gv_scale(GradedVector& y, cplx alpha) {
  for (auto& z : y.coef) z *= alpha;
}

namespace {

cplx edge_symbol(const SpectralCache& cache, int64_t q, int axis, int sign) {
  const double th = double(sign) * cache.p(q, axis);
  return std::polar(1.0, th) - 1.0;
}

cplx shift_phase(const SectorBasis& b, int64_t i, int axis, int sign) {
  const double th = double(sign) * 2.0 * std::numbers::pi *
                    double(b.ksum(i, axis)) / double(b.cache().torus.L);
  return std::polar(1.0, th);
}

}  // namespace

GradedVector apply_creation(const GradedVector& in, const SectorBasis& out_basis, int axis,
                            int sign) {
  const SectorBasis& ib = *in.basis;
  const SpectralCache& cache = ib.cache();
  const int n = ib.n();
  if (out_basis.n() != n + 1) throw std::invalid_argument("apply_creation: need sector n+1");
  GradedVector out = gv_zero(out_basis);
  const int64_t modes = cache.torus.volume() - 1;
  const double inv_sqrt = 1.0 / std::sqrt(double(n + 1));
  std::vector<int32_t> merged(static_cast<size_t>(n + 1));
  for (int64_t i = 0; i < ib.size(); ++i) {
    const cplx psi = in.coef[size_t(i)];
    if (psi == cplx(0.0, 0.0)) continue;
    const int32_t* r = ib.rep(i);
    for (int64_t qm = 1; qm <= modes; ++qm) {
      const int32_t q = int32_t(qm);
      // sorted insert of q into the multiset, counting copies of q
      int pos = 0;
      while (pos < n && r[pos] < q) ++pos;
      int count = 1;
      for (int kx = pos; kx < n && r[kx] == q; ++kx) ++count;
      for (int kx = 0; kx < pos; ++kx) merged[size_t(kx)] = r[kx];
      merged[size_t(pos)] = q;
      for (int kx = pos; kx < n; ++kx) merged[size_t(kx + 1)] = r[kx];
      const int64_t oi = out_basis.find(merged.data());
      if (oi < 0) throw std::logic_error("apply_creation: missing multiset");
      out.coef[size_t(oi)] += double(count) * edge_symbol(cache, qm, axis, sign) * psi * inv_sqrt;
    }
  }
  return out;
}

GradedVector apply_annihilation(const GradedVector& in, const SectorBasis& out_basis, int axis,
                                int sign) {
  const SectorBasis& ib = *in.basis;
  const SpectralCache& cache = ib.cache();
  const int m = ib.n();
  if (m < 1) throw std::invalid_argument("apply_annihilation: vacuum has no lower sector");
  if (out_basis.n() != m - 1) throw std::invalid_argument("apply_annihilation: need sector n-1");
  GradedVector out = gv_zero(out_basis);
  const int64_t modes = cache.torus.volume() - 1;
  const double root_m = std::sqrt(double(m));
  std::vector<int32_t> merged(static_cast<size_t>(m));
  for (int64_t i = 0; i < out_basis.size(); ++i) {
    const int32_t* r = out_basis.rep(i);
    KahanSum re, im;
    for (int64_t qm = 1; qm <= modes; ++qm) {
      const int32_t q = int32_t(qm);
      int pos = 0;
      while (pos < m - 1 && r[pos] < q) ++pos;
      for (int kx = 0; kx < pos; ++kx) merged[size_t(kx)] = r[kx];
      merged[size_t(pos)] = q;
      for (int kx = pos; kx < m - 1; ++kx) merged[size_t(kx + 1)] = r[kx];
      const int64_t ii = ib.find(merged.data());
      if (ii < 0) throw std::logic_error("apply_annihilation: missing multiset");
      const cplx term = std::conj(edge_symbol(cache, qm, axis, sign)) *
                        SectorBasis::mode_weight(cache, qm) * in.coef[size_t(ii)];
      re.add(term.real());
      im.add(term.imag());
    }
    out.coef[size_t(i)] = root_m * cplx(re.value(), im.value());
  }
  return out;
}

GradedVector apply_shift(const GradedVector& in, int axis, int sign) {
  GradedVector out = in;
  for (int64_t i = 0; i < in.basis->size(); ++i)
    out.coef[size_t(i)] *= shift_phase(*in.basis, i, axis, sign);
  return out;
}

GradedVector apply_nabla(const GradedVector& in, int axis, int sign) {
  GradedVector out = in;
  for (int64_t i = 0; i < in.basis->size(); ++i)
    out.coef[size_t(i)] *= shift_phase(*in.basis, i, axis, sign) - 1.0;
  return out;
}

GradedVector apply_half_inv_nabla(const GradedVector& in, int axis, int sign) {
  GradedVector out = in;
  for (int64_t i = 0; i < in.basis->size(); ++i) {
    const double dh = in.basis->dhat_total(i);
    if (dh <= 0.0)
      out.coef[size_t(i)] = 0.0;
    else
      out.coef[size_t(i)] *= (shift_phase(*in.basis, i, axis, sign) - 1.0) / std::sqrt(2.0 * dh);
  }
  return out;
}

GradedVector apply_half_inv(const GradedVector& in) {
  GradedVector out = in;
  for (int64_t i = 0; i < in.basis->size(); ++i) {
    const double dh = in.basis->dhat_total(i);
    out.coef[size_t(i)] = (dh <= 0.0) ? 0.0 : out.coef[size_t(i)] / std::sqrt(2.0 * dh);
  }
  return out;
}

NormEstimate operator_norm(const std::function<GradedVector(const GradedVector&)>& fwd,
                           const std::function<GradedVector(const GradedVector&)>& adj,
                           const SectorBasis& domain, uint64_t seed, int max_iters,
                           double tol) {
  GradedVector v = gv_random(domain, seed);
  NormEstimate est;
  double rho_prev = -1.0;
  for (int it = 1; it <= max_iters; ++it) {
    GradedVector w = fwd(v);
    const double nw = gv_norm(w);
    const double rho = nw * nw;  // rayleigh quotient of A*A at unit v
    est.iters = it;
    if (rho == 0.0) {
      est.norm = 0.0;
      est.resid = 0.0;
      return est;
    }
    GradedVector y = adj(w);
    GradedVector r = y;
    gv_axpy(r, cplx(-rho, 0.0), v);
    est.resid = gv_norm(r) / rho;
    const double ny = gv_norm(y);
    if (ny == 0.0) {
      est.norm = std::sqrt(rho);
      return est;
    }
    gv_scale(y, cplx(1.0 / ny, 0.0));
    v = std::move(y);
    if (rho_prev >= 0.0 && std::fabs(rho - rho_prev) <= tol * rho && it >= 5) {
      est.norm = std::sqrt(rho);
      return est;
    }
    rho_prev = rho;
  }
  est.norm = std::sqrt(std::max(rho_prev, 0.0));
  return est;
}

double creation_norm_squared_reference(const SpectralCache& cache, int n) {
  const double v = double(cache.torus.volume());
  return (1.0 - 1.0 / v) * double(n + 1) / (2.0 * double(cache.torus.d));
}

NormEstimate creation_norm(SectorFamily& fam, int n, int axis, int sign, uint64_t seed) {
  const SectorBasis& dom = fam.sector(n);
  const SectorBasis& cod = fam.sector(n + 1);
  auto fwd = [&](const GradedVector& v) { return apply_creation(v, cod, axis, sign); };
  auto adj = [&](const GradedVector& w) { return apply_annihilation(w, dom, axis, sign); };
  return operator_norm(fwd, adj, dom, seed);
}

NormEstimate annihilation_norm(SectorFamily& fam, int n, int axis, int sign, uint64_t seed) {
  if (n < 1) throw std::invalid_argument("annihilation_norm: need n >= 1");
  const SectorBasis& dom = fam.sector(n);
  const SectorBasis& cod = fam.sector(n - 1);
  auto fwd = [&](const GradedVector& v) { return apply_annihilation(v, cod, axis, sign); };
  auto adj = [&](const GradedVector& w) { return apply_creation(w, dom, axis, sign); };
  return operator_norm(fwd, adj, dom, seed);
}

NormEstimate half_inv_creation_norm(SectorFamily& fam, int n, int axis, int sign,
                                    uint64_t seed) {
  const SectorBasis& dom = fam.sector(n);
  const SectorBasis& cod = fam.sector(n + 1);
  auto fwd = [&](const GradedVector& v) {
    return apply_half_inv(apply_creation(v, cod, axis, sign));
  };
  auto adj = [&](const GradedVector& w) {
    return apply_annihilation(apply_half_inv(w), dom, axis, sign);
  };
  return operator_norm(fwd, adj, dom, seed);
}

double half_inv_nabla_max(const SectorBasis& basis, int axis, int sign) {
  // |exp(i theta) - 1|^2 = 2 - 2 cos theta; evaluating the ratio through the
  // same 1 - cos terms that built dhat_total keeps axis-aligned momenta at
  // exactly 1, the analytic sup
  (void)sign;  // the modulus is even in theta
  const double two_pi = 2.0 * std::numbers::pi;
  double best = 0.0;
  for (int64_t i = 0; i < basis.size(); ++i) {
    const double dh = basis.dhat_total(i);
    if (dh <= 0.0) continue;
    const double th =
        two_pi * double(basis.ksum(i, axis)) / double(basis.cache().torus.L);
    const double num2 = 2.0 - 2.0 * std::cos(th);
    best = std::max(best, std::sqrt(num2 / (2.0 * dh)));
  }
  return best;
}

double adjoint_residual(SectorFamily& fam, int n, int axis, int sign, uint64_t seed) {
  const SectorBasis& bn = fam.sector(n);
  const SectorBasis& bn1 = fam.sector(n + 1);
  const GradedVector u = gv_random(bn, seed);
  const GradedVector v = gv_random(bn1, splitmix64_at(seed, 1));
  const GradedVector cu = apply_creation(u, bn1, axis, sign);
  const GradedVector av = apply_annihilation(v, bn, axis, sign);
  return std::abs(gv_inner(cu, v) - gv_inner(u, av));
}

double shift_reflection_residual(const SectorBasis& basis, int axis, int sign) {
  // diagonal values of T_{-e} N_e + N_{-e}: exact cancellation expected
  double worst = 0.0;
  for (int64_t i = 0; i < basis.size(); ++i) {
    const double dh = basis.dhat_total(i);
    if (dh <= 0.0) continue;
    const cplx te = shift_phase(basis, i, axis, -sign);
    const cplx ne = (shift_phase(basis, i, axis, sign) - 1.0) / std::sqrt(2.0 * dh);
    const cplx nme = (shift_phase(basis, i, axis, -sign) - 1.0) / std::sqrt(2.0 * dh);
    worst = std::max(worst, std::abs(te * ne + nme));
  }
  return worst;
}

namespace {

void window_accumulate(SectorFamily& fam, GradedWindow& acc, const GradedWindow& add,
                       double coeff) {
  // align sector ranges and add coeff * add into acc
  const int lo = std::min(acc.lo, add.lo);
  const int hi = std::max(acc.lo + int(acc.parts.size()), add.lo + int(add.parts.size()));
  GradedWindow out;
  out.lo = lo;
  out.parts.reserve(size_t(hi - lo));
  for (int sct = lo; sct < hi; ++sct) {
    GradedVector part = gv_zero(fam.sector(sct));
    const int ia = sct - acc.lo;
    if (ia >= 0 && ia < int(acc.parts.size())) gv_axpy(part, cplx(1.0, 0.0), acc.parts[size_t(ia)]);
    const int ib = sct - add.lo;
    if (ib >= 0 && ib < int(add.parts.size())) gv_axpy(part, cplx(coeff, 0.0), add.parts[size_t(ib)]);
    out.parts.push_back(std::move(part));
  }
  acc = std::move(out);
}

GradedWindow apply_x_window(SectorFamily& fam, const GradedWindow& in, int axis, int sign) {
  // X = a* + a sends the window [lo, hi] to [max(lo-1, 0), hi+1]
  const int hi = in.lo + int(in.parts.size()) - 1;
  const int out_lo = std::max(in.lo - 1, 0);
  const int out_hi = hi + 1;
  GradedWindow out;
  out.lo = out_lo;
  for (int sct = out_lo; sct <= out_hi; ++sct) out.parts.push_back(gv_zero(fam.sector(sct)));
  for (int sct = in.lo; sct <= hi; ++sct) {
    const GradedVector& part = in.parts[size_t(sct - in.lo)];
    GradedVector up = apply_creation(part, fam.sector(sct + 1), axis, sign);
    gv_axpy(out.parts[size_t(sct + 1 - out_lo)], cplx(1.0, 0.0), up);
    if (sct >= 1) {
      GradedVector down = apply_annihilation(part, fam.sector(sct - 1), axis, sign);
      gv_axpy(out.parts[size_t(sct - 1 - out_lo)], cplx(1.0, 0.0), down);
    }
  }
  return out;
}

}  // namespace

GradedWindow apply_s_of_x(SectorFamily& fam, const Poly& s, const GradedWindow& in, int axis,
                          int sign) {
  GradedWindow acc;
  acc.lo = in.lo;
  for (const auto& part : in.parts) acc.parts.push_back(gv_zero(*part.basis));
  if (!s.is_zero()) window_accumulate(fam, acc, in, s.coeff(0));
  GradedWindow power = in;
  for (int k = 1; k <= s.degree(); ++k) {
    power = apply_x_window(fam, power, axis, sign);
    if (s.coeff(size_t(k)) != 0.0) window_accumulate(fam, acc, power, s.coeff(size_t(k)));
  }
  return acc;
}

SectorNormResult s_sector_norm(SectorFamily& fam, const Poly& s, int n, int axis, int sign,
                               uint64_t seed) {
  SectorNormResult res;
  const SectorBasis& dom = fam.sector(n);
  GradedVector v = gv_random(dom, seed);
  double rho_prev = -1.0;
  const int max_iters = 2000;
  const double tol = 1e-13;
  for (int it = 1; it <= max_iters; ++it) {
    GradedWindow w1;
    w1.lo = n;
    w1.parts.push_back(v);
    w1 = apply_s_of_x(fam, s, w1, axis, sign);
    KahanSum rho_acc;
    for (const auto& part : w1.parts) {
      const double nm = gv_norm(part);
      rho_acc.add(nm * nm);
    }
    const double rho = rho_acc.value();
    res.estimate.iters = it;
    if (rho == 0.0) {
      res.estimate.norm = 0.0;
      break;
    }
    const GradedWindow w2 = apply_s_of_x(fam, s, w1, axis, sign);
    GradedVector y = w2.parts[size_t(n - w2.lo)];
    GradedVector r = y;
    gv_axpy(r, cplx(-rho, 0.0), v);
    res.estimate.resid = gv_norm(r) / rho;
    const double ny = gv_norm(y);
    if (ny == 0.0) {
      res.estimate.norm = std::sqrt(rho);
      break;
    }
    gv_scale(y, cplx(1.0 / ny, 0.0));
    v = std::move(y);
    if (rho_prev >= 0.0 && std::fabs(rho - rho_prev) <= tol * rho && it >= 5) {
      res.estimate.norm = std::sqrt(rho);
      break;
    }
    rho_prev = rho;
    if (it == max_iters) res.estimate.norm = std::sqrt(rho);
  }
  // analytic ceiling: ||X restricted to sector m|| <= sqrt(v)(sqrt(m+1)+sqrt(m))
  const SpectralCache& cache = fam.cache();
  const double vref = creation_norm_squared_reference(cache, 0);
  double ceiling = std::fabs(s.coeff(0));
  double prod = 1.0;
  for (int k = 1; k <= s.degree(); ++k) {
    const int m = n + k - 1;
    prod *= std::sqrt(vref) * (std::sqrt(double(m + 1)) + std::sqrt(double(m)));
    ceiling += std::fabs(s.coeff(size_t(k))) * prod;
  }
  res.ceiling = ceiling;
  return res;
}

IntegralBoundResult integral_bound_scan(int d, int axis, int Lq, int n_p, int threads) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("integral_bound_scan: bad d");
  if (axis < 0 || axis >= d) throw std::invalid_argument("integral_bound_scan: bad axis");
  if (n_p < 2 || n_p % 2 != 0)
    throw std::invalid_argument("integral_bound_scan: p-grid size must be even");
  const Torus qt(d, Lq);
  const int64_t vq = qt.volume();
  const double two_pi = 2.0 * std::numbers::pi;

  auto level_values = [&](int n) {
    // precomputed trig on the shifted midpoint p-grid
    std::vector<double> cp(static_cast<size_t>(n)), sp(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double p = -std::numbers::pi + (double(i) + 0.5) * two_pi / double(n);
      cp[size_t(i)] = std::cos(p);
      sp[size_t(i)] = std::sin(p);
    }
    std::vector<double> vals(size_t(vq), 0.0);
    auto one_q = [&](int64_t qi) {
      int qc[kMaxDim];
      qt.coords(qi, qc);
      double cq[kMaxDim], sq[kMaxDim];
      for (int a = 0; a < d; ++a) {
        const double q = two_pi * double(qc[a]) / double(Lq);
        cq[a] = std::cos(q);
        sq[a] = std::sin(q);
      }
      int idx[kMaxDim] = {0, 0, 0, 0};
      KahanSum acc;
      while (true) {
        double dp = 0.0, dpq = 0.0;
        for (int a = 0; a < d; ++a) {
          const double c = cp[size_t(idx[a])], s = sp[size_t(idx[a])];
          dp += 1.0 - c;
          dpq += 1.0 - (c * cq[a] - s * sq[a]);
        }
        if (dp < 1e-14 || dpq < 1e-14)
          throw std::logic_error("integral_bound_scan: p-grid hit a singularity");
        acc.add(2.0 * (1.0 - cp[size_t(idx[axis])]) / (dp * dpq));
        int a = d - 1;
        while (a >= 0 && ++idx[a] == n) {
          idx[a] = 0;
          --a;
        }
        if (a < 0) break;
      }
      vals[size_t(qi)] = acc.value() / std::pow(double(n), d);
    };
    const int nthreads = int(std::min<int64_t>(std::max(1, threads), vq));
    if (nthreads == 1) {
      for (int64_t qi = 0; qi < vq; ++qi) one_q(qi);
    } else {
      std::vector<std::thread> pool;
      for (int tid = 0; tid < nthreads; ++tid)
        pool.emplace_back([&, tid] {
          for (int64_t qi = tid; qi < vq; qi += nthreads) one_q(qi);
        });
      for (auto& th : pool) th.join();
    }
    return vals;
  };

  const std::vector<double> coarse = level_values(n_p);
  const std::vector<double> fine = level_values(2 * n_p);
  IntegralBoundResult out;
  int64_t arg = 0;
  for (int64_t qi = 0; qi < vq; ++qi) {
    if (fine[size_t(qi)] > out.sup_value) {
      out.sup_value = fine[size_t(qi)];
      arg = qi;
    }
    out.sup_coarse = std::max(out.sup_coarse, coarse[size_t(qi)]);
  }
  out.rel_drift = std::fabs(out.sup_value - out.sup_coarse) / out.sup_value;
  out.stable = out.rel_drift <= 0.02;
  int qc[kMaxDim];
  qt.coords(arg, qc);
  out.argmax_q.assign(qc, qc + d);
  return out;
}

}  // namespace msaw
