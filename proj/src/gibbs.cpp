#include "msaw/gibbs.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace msaw {

TorusField sample_gff(const SpectralCache& cache, uint64_t seed, double variance_scale) {
  const Torus& t = cache.torus;
  const int64_t v = t.volume();
  if (variance_scale <= 0.0) throw std::invalid_argument("sample_gff: variance_scale must be > 0");
  Rng rng(seed);
  std::vector<std::complex<double>> what(size_t(v), 0.0);
  // hermitian-paired spectral weights: E|what(k)|^2 = V * C(k),
  // C(k) = variance_scale / (2 Dhat(k)), so cov(omega(x), omega(y)) =
  // variance_scale * b(x - y). draw in flat index order for determinism.
  int kc[kMaxDim], mc[kMaxDim];
  for (int64_t k = 1; k < v; ++k) {
    t.coords(k, kc);
    for (int a = 0; a < t.d; ++a) mc[a] = t.mod(-kc[a]);
    const int64_t mirror = t.index(mc);
    if (mirror < k) continue;  // filled when its partner was visited
    const double chat = variance_scale / (2.0 * cache.dhat[size_t(k)]);
    if (mirror == k) {
      // self-conjugate mode: real gaussian
      what[size_t(k)] = rng.normal() * std::sqrt(double(v) * chat);
    } else {
      const double sd = std::sqrt(double(v) * chat / 2.0);
      const std::complex<double> z(rng.normal() * sd, rng.normal() * sd);
      what[size_t(k)] = z;
      what[size_t(mirror)] = std::conj(z);
    }
  }
  TorusFft fft(t);
  fft.to_position(what);
  TorusField f(t, FieldTag::exact_gaussian, seed);
  for (int64_t x = 0; x < v; ++x) {
    if (std::fabs(what[size_t(x)].imag()) > 1e-9)
      throw std::runtime_error("sample_gff: non-real field after inverse transform");
    f.values[size_t(x)] = what[size_t(x)].real();
  }
  f.re_center();
  return f;
}

GibbsChain::GibbsChain(const RateSpec& spec, const Torus& torus, uint64_t seed,
                       const McmcOptions& opt)
    : spec_(spec),
      big_r_(spec.potential()),
      big_r_d_(spec.r),
      opt_(opt),
      state_(torus, FieldTag::mcmc, seed),
      nb_(torus.neighbor_table()),
      rng_(seed) {
  if (spec_.c <= 0.0) throw std::invalid_argument("gibbs chain: need convexity constant c > 0");
  if (spec_.r.is_zero()) throw std::invalid_argument("gibbs chain: r == 0 has no gibbs measure");
}

void GibbsChain::update_site(int64_t i) {
  const Torus& t = state_.torus;
  const int twod = 2 * t.d;
  double nu[2 * kMaxDim];
  double nu_bar = 0.0;
  for (int j = 0; j < twod; ++j) {
    nu[j] = state_.values[size_t(nb_[size_t(i) * size_t(twod) + size_t(j)])];
    nu_bar += nu[j];
  }
  nu_bar /= double(twod);
  const double dc = double(t.d) * spec_.c;
  const double sigma = 1.0 / std::sqrt(2.0 * dc);

  // conditional energy V(u) = sum_j R(u - nu_j); split off the gaussian
  // envelope: phi(u) = V(u) - dc (u - nu_bar)^2 is convex because
  // V'' = sum_j r'(u - nu_j) >= 2 d c.
  auto phi = [&](double u) {
    double acc = 0.0;
    for (int j = 0; j < twod; ++j) acc += big_r_(u - nu[j]);
    return acc - dc * (u - nu_bar) * (u - nu_bar);
  };
  auto phi_d = [&](double u) {
    double acc = 0.0;
    for (int j = 0; j < twod; ++j) acc += big_r_d_(u - nu[j]);
    return acc - 2.0 * dc * (u - nu_bar);
  };

  // locate min phi: phi' is nondecreasing; expand a bracket around nu_bar
  double lo = nu_bar - sigma, hi = nu_bar + sigma;
  double width = sigma;
  for (int it = 0; it < 200 && phi_d(lo) > 0.0; ++it) {
    width *= 2.0;
    lo = nu_bar - width;
  }
  width = sigma;
  for (int it = 0; it < 200 && phi_d(hi) < 0.0; ++it) {
    width *= 2.0;
    hi = nu_bar + width;
  }
  const double tol = 1e-12 * (1.0 + std::fabs(nu_bar) + sigma);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (phi_d(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double m = 0.5 * (lo + hi);
  // rigorous lower bound on min phi from convexity: any K <= min phi keeps the
  // rejection step exact (acceptance exp(-(phi - K)) <= 1)
  const double K = phi(m) - std::fabs(phi_d(m)) * (hi - lo) - 1e-300;

  uint64_t local = 0;
  while (true) {
    if (++local > uint64_t(opt_.max_proposals_per_update))
      throw std::runtime_error(
          "gibbs chain: site update exceeded max_proposals_per_update; sampler stuck");
    ++proposals_;
    const double u = nu_bar + sigma * rng_.normal();
    const double excess = phi(u) - K;
    if (excess <= 0.0 || rng_.exponential() >= excess) {
      state_.values[size_t(i)] = u;
      return;
    }
  }
}

void GibbsChain::sweep(int64_t n_sweeps) {
  const int64_t v = state_.torus.volume();
  for (int64_t s = 0; s < n_sweeps; ++s) {
    for (int64_t i = 0; i < v; ++i) update_site(i);
    state_.re_center();
  }
}

TorusField sample_gibbs(const RateSpec& spec, const SpectralCache& cache, uint64_t seed,
                        const McmcOptions& opt) {
  if (spec.r.is_zero())
    throw std::invalid_argument("sample_gibbs: r == 0 defines no gibbs measure");
  if (spec.is_linear_r()) {
    // quadratic potential: exact gaussian with covariance torus_green / r'(0)
    TorusField f = sample_gff(cache, seed, 1.0 / spec.r.coeff(1));
    return f;
  }
  GibbsChain chain(spec, cache.torus, seed, opt);
  chain.sweep(opt.burn_in_sweeps);
  return chain.state();
}

TorusField sample_stationary_env(const RateSpec& spec, const SpectralCache& cache,
                                 uint64_t seed, const McmcOptions& opt) {
  if (spec.interaction_free()) {
    // constant-rate walk: start from the flat profile
    return TorusField(cache.torus, FieldTag::dynamics, seed);
  }
  TorusField f = sample_gibbs(spec.doubled_potential(), cache, seed, opt);
  f.tag = FieldTag::dynamics;
  return f;
}

std::vector<TorusField> sample_field_ensemble(const RateSpec& spec, const SpectralCache& cache,
                                              int64_t n, uint64_t master_seed, int threads,
                                              const McmcOptions& opt, bool env_law) {
  if (n <= 0) throw std::invalid_argument("sample_field_ensemble: n must be > 0");
  const RateSpec eff = env_law ? spec.doubled_potential() : spec;
  std::vector<TorusField> out(static_cast<size_t>(n));
  if (eff.interaction_free() && env_law) {
    for (int64_t i = 0; i < n; ++i)
      out[size_t(i)] = TorusField(cache.torus, FieldTag::dynamics, splitmix64_at(master_seed, uint64_t(i)));
    return out;
  }
  if (eff.is_linear_r()) {
    const double scale = 1.0 / eff.r.coeff(1);
    const int nthreads = int(std::min<int64_t>(std::max(1, threads), n));
    auto worker = [&](int tid) {
      for (int64_t i = tid; i < n; i += nthreads)
        out[size_t(i)] = sample_gff(cache, splitmix64_at(master_seed, uint64_t(i)), scale);
    };
    if (nthreads == 1) {
      worker(0);
    } else {
      std::vector<std::thread> pool;
      for (int tLoop = 0; tLoop < nthreads; ++tLoop) pool.emplace_back(worker, tLoop);
      for (auto& th : pool) th.join();
    }
  } else {
    GibbsChain chain(eff, cache.torus, master_seed, opt);
    chain.sweep(opt.burn_in_sweeps);
    for (int64_t i = 0; i < n; ++i) {
      chain.sweep(opt.stride_sweeps);
      out[size_t(i)] = chain.state();
      out[size_t(i)].seed = splitmix64_at(master_seed, uint64_t(i));
    }
  }
  if (env_law)
    for (auto& f : out) f.tag = FieldTag::dynamics;
  return out;
}

namespace {

// gradient of the dipole functional as a dense vector: dF/domega(y)
std::vector<double> functional_gradient(const Torus& t, const DipoleFunctional& f) {
  // each term contributes +a at its site and -a at the neighbor, so the
  // result is orthogonal to constants for any weights
  std::vector<double> beta(size_t(t.volume()), 0.0);
  for (const auto& [site, a] : f.alpha) {
    if (site < 0 || site >= t.volume())
      throw std::invalid_argument("dipole functional: site out of range");
    beta[size_t(site)] += a;
    beta[size_t(t.neighbor(site, f.axis, +1))] -= a;
  }
  return beta;
}

double green_quadratic_form(const Torus& t, const std::vector<double>& green,
                            const std::vector<double>& beta) {
  // Q = sum_{y,z} beta(y) b(y - z) beta(z); beta is sparse in practice but a
  // dense double loop over its support is plenty at desk scale
  std::vector<int64_t> supp;
  for (int64_t y = 0; y < t.volume(); ++y)
    if (beta[size_t(y)] != 0.0) supp.push_back(y);
  int yc[kMaxDim], zc[kMaxDim], dcoord[kMaxDim];
  KahanSum q;
  for (int64_t y : supp) {
    t.coords(y, yc);
    for (int64_t z : supp) {
      t.coords(z, zc);
      for (int a = 0; a < t.d; ++a) dcoord[a] = yc[a] - zc[a];
      q.add(beta[size_t(y)] * green[size_t(t.index(dcoord))] * beta[size_t(z)]);
    }
  }
  return q.value();
}

double reference_dipole(const TorusField& f) {
  return f.values[0] - f.values[size_t(f.torus.neighbor(0, 0, +1))];
}

}  // namespace

TiltedVarianceBound tilted_variance_bound_check(const std::vector<TorusField>& fields,
                                                const RateSpec& spec,
                                                const std::vector<double>& green,
                                                const DipoleFunctional& f, double lambda) {
  if (fields.empty()) throw std::invalid_argument("tilted_variance_bound_check: no fields");
  const Torus& t = fields.front().torus;
  if (lambda < 0.0 || lambda >= spec.c)
    throw std::invalid_argument("tilted_variance_bound_check: need 0 <= lambda < c");
  const std::vector<double> beta = functional_gradient(t, f);
  const double q = green_quadratic_form(t, green, beta);

  // per-replica ingredients: (e, F e, F^2 e) with e = exp(lambda g^2)
  std::vector<std::vector<double>> rows;
  rows.reserve(fields.size());
  for (const auto& fld : fields) {
    const double g = reference_dipole(fld);
    const double e = std::exp(lambda * g * g);
    double fv = 0.0;
    for (const auto& [site, a] : f.alpha)
      fv += a * (fld.values[size_t(site)] -
                 fld.values[size_t(t.neighbor(site, f.axis, +1))]);
    rows.push_back({e, fv * e, fv * fv * e});
  }
  const double cl = spec.c - lambda;
  auto margin = [&](const std::vector<double>& m) {
    // lhs - rhs = E[e] E[F^2 e] - E[F e]^2 - Q/(c-lambda) E[e]^2
    return m[0] * m[2] - m[1] * m[1] - q / cl * m[0] * m[0];
  };
  const JackknifeResult jk = jackknife(rows, margin);

  TiltedVarianceBound out;
  out.lambda = lambda;
  out.quad_form = q / spec.c;
  out.margin_se = jk.se;
  // recompute the two sides for reporting
  std::vector<KahanSum> s(3);
  for (const auto& row : rows)
    for (int k = 0; k < 3; ++k) s[size_t(k)].add(row[size_t(k)]);
  const double n = double(rows.size());
  const double me = s[0].value() / n, mfe = s[1].value() / n, mffe = s[2].value() / n;
  out.lhs = me * mffe - mfe * mfe;
  out.rhs = q / cl * me * me;
  out.ok = (out.lhs - out.rhs) <= 3.0 * jk.se + 1e-12;
  return out;
}

std::vector<LaplaceBound> laplace_bound_check(const std::vector<TorusField>& fields,
                                              const RateSpec& spec,
                                              const std::vector<double>& green,
                                              const std::vector<double>& lambdas) {
  if (fields.empty()) throw std::invalid_argument("laplace_bound_check: no fields");
  const Torus& t = fields.front().torus;
  const double beta = 2.0 * (green[0] - green[size_t(t.neighbor(0, 0, +1))]);
  std::vector<double> g2;
  g2.reserve(fields.size());
  for (const auto& fld : fields) {
    const double g = reference_dipole(fld);
    g2.push_back(g * g);
  }
  std::vector<LaplaceBound> out;
  for (double lambda : lambdas) {
    if (lambda < 0.0 || lambda > 0.9 * spec.c)
      throw std::invalid_argument("laplace_bound_check: lambda grid must lie in [0, 0.9 c]");
    std::vector<double> e;
    e.reserve(g2.size());
    for (double x : g2) e.push_back(std::exp(lambda * x));
    const MeanVar mv = mean_var(e);
    LaplaceBound b;
    b.lambda = lambda;
    b.z_hat = mv.mean;
    b.se = mv.se;
    b.variance_proxy = beta / spec.c;
    b.bound = std::pow(1.0 - lambda / spec.c, -beta);
    b.ok = mv.mean <= b.bound + 3.0 * mv.se + 1e-12;
    out.push_back(b);
  }
  return out;
}

}  // namespace msaw
