#pragma once
// momentum-space tables and lattice Green's function. the graph Laplacian
// (Lap f)(x) = sum_{|y-x|=1} (f(y) - f(x)) has symbol -2 Dhat(p) with
// Dhat(p) = sum_l (1 - cos p_l), p_k = 2 pi k / L. the kernel b = torus_green
// inverts -Lap on the mean-zero subspace:
//   b(x) = V^{-1} sum_{k != 0} exp(-i p_k . x) / (2 Dhat(p_k)),
//   (-Lap b)(x) = delta_0(x) - V^{-1},
//   sum_{j in [0,2d)} (b(0) - b(e_j)) = 1 - V^{-1}  exactly.

#include <functional>
#include <vector>

#include "msaw/fft.hpp"
#include "msaw/torus.hpp"

namespace msaw {

struct SpectralCache {
  Torus torus;
  std::vector<double> dhat;      // Dhat(p_k) per flat momentum index; dhat[0] = 0
  std::vector<double> momentum;  // V x d table of p_k components in (-pi, pi]

  explicit SpectralCache(const Torus& t);
  double p(int64_t k, int axis) const { return momentum[size_t(k) * size_t(torus.d) + size_t(axis)]; }
};

// position-space Green's function b (zero mode dropped), real vector of size V
std::vector<double> torus_green(const SpectralCache& cache);

// (1 - cos p_axis) / Dhat(p) on the momentum grid; the d kernels sum to 1 at
// every k != 0, and the k = 0 entry is set to 1/d to keep that identity.
std::vector<double> gamma_kernel_hat(const SpectralCache& cache, int axis);

// normalized Brillouin-zone averages (2 pi)^{-d} int_{[-pi,pi]^d} f(p) dp via
// the midpoint rule on a shifted n^d grid, p_i = -pi + (i + 1/2) 2 pi / n.
// n must be even so the grid avoids p = 0 and is symmetric under p -> -p.
double midpoint_brillouin(const std::function<double(const double*)>& f, int d, int n,
                          int threads = 1);

struct QuadratureResult {
  double value = 0;       // finest level (2n)
  double coarse = 0;      // level n
  double richardson = 0;  // (4 value - coarse) / 3
  double err_estimate = 0;
  bool converged = false;  // err_estimate <= 5% of |value|
};

QuadratureResult integrate_brillouin(const std::function<double(const double*)>& f, int d,
                                     int n, int threads = 1);

}  // namespace msaw
