#pragma once
// samplers for the gradient Gibbs measure pi ~ exp(-sum_{edges} R(grad omega))
// with R the even convex potential of a RateSpec (R'' = r' >= c > 0), plus the
// variance-bound checks run against sampled field ensembles.
//
// two routes produce exact draws:
//  - linear r (quadratic R): spectral sampling of the Gaussian measure with
//    covariance torus_green / r'(0);
//  - general r: systematic-scan heat bath whose site conditionals are drawn by
//    exact rejection (gaussian envelope matched to the convexity constant).
//
// the stationary law of the walk's environment is the same measure with the
// odd part doubled (doubled_potential()); sample_stationary_env handles that.

#include <cstdint>
#include <vector>

#include "msaw/field.hpp"
#include "msaw/rate.hpp"
#include "msaw/rng.hpp"
#include "msaw/spectral.hpp"
#include "msaw/stats.hpp"

namespace msaw {

// exact draw of the mean-zero Gaussian field with covariance
// variance_scale * torus_green (hermitian-paired spectral sampling)
TorusField sample_gff(const SpectralCache& cache, uint64_t seed, double variance_scale = 1.0);

struct McmcOptions {
  int64_t burn_in_sweeps = 1000;
  int64_t stride_sweeps = 8;                  // sweeps between consecutive samples
  int64_t max_proposals_per_update = 1000000; // stuck-sampler guard
};

// heat-bath chain targeting exp(-sum_edges R(grad)); one sweep = one
// systematic lexicographic pass; the field is re-centered after every sweep
class GibbsChain {
public:
  GibbsChain(const RateSpec& spec, const Torus& torus, uint64_t seed,
             const McmcOptions& opt = {});
  void sweep(int64_t n_sweeps);
  const TorusField& state() const { return state_; }
  uint64_t total_proposals() const { return proposals_; }

private:
  void update_site(int64_t i);

  RateSpec spec_;
  Poly big_r_;      // R = antiderivative of r
  Poly big_r_d_;    // R' = r
  McmcOptions opt_;
  TorusField state_;
  std::vector<int32_t> nb_;
  Rng rng_;
  uint64_t proposals_ = 0;
};

// burn-in then return the chain state (general-r route), or an exact gaussian
// draw when r is linear
TorusField sample_gibbs(const RateSpec& spec, const SpectralCache& cache, uint64_t seed,
                        const McmcOptions& opt = {});

// stationary initial law of the walk environment: gibbs measure of
// spec.doubled_potential(); flat field if the model is interaction-free
TorusField sample_stationary_env(const RateSpec& spec, const SpectralCache& cache,
                                 uint64_t seed, const McmcOptions& opt = {});

// n independent-by-seed draws; env_law picks sampler measure vs stationary
// environment law. exact gaussian route is parallelized over fields; the mcmc
// route advances one chain with stride_sweeps between samples (threads ignored)
std::vector<TorusField> sample_field_ensemble(const RateSpec& spec, const SpectralCache& cache,
                                              int64_t n, uint64_t master_seed, int threads,
                                              const McmcOptions& opt = {}, bool env_law = false);

// F(omega) = sum_x alpha(x) (omega(x) - omega(x + e_axis))
struct DipoleFunctional {
  int axis = 0;
  std::vector<std::pair<int64_t, double>> alpha;
};

// variance bound for F under the exponentially tilted measure
// e^{lambda g^2} pi / Z, g = omega(0) - omega(e_1), lambda < c:
//   E[e L] E[F^2 e L] - E[F e L]^2 <= Q(F) / (c - lambda) * E[e L]^2,
// Q(F) = <dF, b dF> with b = torus_green. reported as (lhs - rhs <= 3 se).
struct TiltedVarianceBound {
  double lambda = 0;
  double lhs = 0, rhs = 0;   // at the replica means
  double margin_se = 0;      // jackknife se of lhs - rhs
  double quad_form = 0;      // Q(F) / c
  bool ok = false;
};
TiltedVarianceBound tilted_variance_bound_check(const std::vector<TorusField>& fields,
                                                const RateSpec& spec,
                                                const std::vector<double>& green,
                                                const DipoleFunctional& f, double lambda);

// laplace-transform bound Z(lambda) = E[e^{lambda g^2}] <= (1 - lambda/c)^{-beta}
// with beta = 2 (b(0) - b(e_1)), obtained by integrating the variance bound for
// dZ/dlambda; requires lambda in [0, 0.9 c]
struct LaplaceBound {
  double lambda = 0;
  double z_hat = 0, se = 0;
  double bound = 0;
  double variance_proxy = 0;  // beta / c, the variance bound for g itself
  bool ok = false;
};
std::vector<LaplaceBound> laplace_bound_check(const std::vector<TorusField>& fields,
                                              const RateSpec& spec,
                                              const std::vector<double>& green,
                                              const std::vector<double>& lambdas);

}  // namespace msaw
