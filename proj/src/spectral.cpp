#include "msaw/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "msaw/stats.hpp"

namespace msaw {

SpectralCache::SpectralCache(const Torus& t) : torus(t) {
  const int64_t v = torus.volume();
  dhat.assign(size_t(v), 0.0);
  momentum.assign(size_t(v) * size_t(torus.d), 0.0);
  const double two_pi = 2.0 * std::numbers::pi;
  for (int64_t k = 0; k < v; ++k) {
    double dh = 0.0;
    for (int a = 0; a < torus.d; ++a) {
      int ka = torus.coord(k, a);
      if (ka > torus.L / 2) ka -= torus.L;  // fold into (-L/2, L/2]
      const double pa = two_pi * double(ka) / double(torus.L);
      momentum[size_t(k) * size_t(torus.d) + size_t(a)] = pa;
      dh += 1.0 - std::cos(pa);
    }
    dhat[size_t(k)] = (k == 0) ? 0.0 : dh;
  }
}

std::vector<double> torus_green(const SpectralCache& cache) {
  const Torus& t = cache.torus;
  const int64_t v = t.volume();
  std::vector<std::complex<double>> spec(static_cast<size_t>(v));
  spec[0] = 0.0;
  for (int64_t k = 1; k < v; ++k) spec[size_t(k)] = 1.0 / (2.0 * cache.dhat[size_t(k)]);
  TorusFft fft(t);
  fft.to_position(spec);
  std::vector<double> out(static_cast<size_t>(v));
  for (int64_t x = 0; x < v; ++x) {
    if (std::fabs(spec[size_t(x)].imag()) > 1e-10)
      throw std::runtime_error("torus_green: non-real inverse transform");
    out[size_t(x)] = spec[size_t(x)].real();
  }
  return out;
}

std::vector<double> gamma_kernel_hat(const SpectralCache& cache, int axis) {
  const Torus& t = cache.torus;
  if (axis < 0 || axis >= t.d) throw std::invalid_argument("gamma_kernel_hat: bad axis");
  const int64_t v = t.volume();
  std::vector<double> out(static_cast<size_t>(v));
  out[0] = 1.0 / double(t.d);
  for (int64_t k = 1; k < v; ++k)
    out[size_t(k)] = (1.0 - std::cos(cache.p(k, axis))) / cache.dhat[size_t(k)];
  return out;
}

double midpoint_brillouin(const std::function<double(const double*)>& f, int d, int n,
                          int threads) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("midpoint_brillouin: d out of range");
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("midpoint_brillouin: n must be even and >= 2 (grid must avoid p = 0)");
  const double h = 2.0 * std::numbers::pi / double(n);
  // outer loop over the first axis is chunked; per-chunk Kahan sums are merged
  // in a fixed order so the result does not depend on the thread count.
  const int nthreads = std::max(1, std::min(threads, n));
  std::vector<KahanSum> partial(static_cast<size_t>(nthreads));
  auto worker = [&](int tid) {
    KahanSum acc;
    double p[kMaxDim] = {0, 0, 0, 0};
    int idx[kMaxDim] = {0, 0, 0, 0};
    for (int i0 = tid; i0 < n; i0 += nthreads) {
      p[0] = -std::numbers::pi + (double(i0) + 0.5) * h;
      if (d == 1) {
        acc.add(f(p));
        continue;
      }
      for (int i = 1; i < d; ++i) idx[i] = 0;
      while (true) {
        for (int i = 1; i < d; ++i) p[i] = -std::numbers::pi + (double(idx[i]) + 0.5) * h;
        acc.add(f(p));
        int axis = d - 1;
        while (axis >= 1 && ++idx[axis] == n) {
          idx[axis] = 0;
          --axis;
        }
        if (axis < 1) break;
      }
    }
    partial[size_t(tid)] = acc;
  };
  if (nthreads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(size_t(nthreads));
    for (int tLoop = 0; tLoop < nthreads; ++tLoop) pool.emplace_back(worker, tLoop);
    for (auto& th : pool) th.join();
  }
  KahanSum total;
  for (const auto& acc : partial) total.merge(acc);
  return total.value() / std::pow(double(n), d);
}

QuadratureResult integrate_brillouin(const std::function<double(const double*)>& f, int d,
                                     int n, int threads) {
  QuadratureResult q;
  q.coarse = midpoint_brillouin(f, d, n, threads);
  q.value = midpoint_brillouin(f, d, 2 * n, threads);
  q.richardson = (4.0 * q.value - q.coarse) / 3.0;
  q.err_estimate = std::fabs(q.value - q.coarse);
  q.converged = q.err_estimate <= 0.05 * std::fabs(q.value) + 1e-300;
  return q;
}

}  // namespace msaw
