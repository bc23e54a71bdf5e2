#pragma once
// graded fock representation of gradient observables on the torus. the
// n-particle sector is spanned by multisets of n nonzero momenta; a symmetric
// tensor is stored by its value per multiset, and the inner product carries
// the weight mult(M) * prod_{q in M} W(q) with the stationary-covariance mode
// weight W(q) = V^{-1} / (4 Dhat(p_q)) and mult(M) = n! / prod(repeats!).
//
// operators along a directed edge e (axis, sign):
//   creation  a*_e : sector n -> n+1 with symbol f(q) = exp(i p_q . e) - 1
//   annihilation a_e = adjoint of a*_e : sector n -> n-1
//   shift T_e: diagonal phase exp(i theta), theta = p-sum . e of the multiset
//   nabla_e = T_e - 1, and |Delta|^{-1/2} nabla_e with the extra
//   1 / sqrt(2 Dhat(p-sum)) factor (zero on zero total momentum).
// closed form: || a*_e restricted to sector n ||^2 = (1 - V^{-1})(n+1)/(2d).

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "msaw/poly.hpp"
#include "msaw/spectral.hpp"

namespace msaw {

using cplx = std::complex<double>;

class SectorBasis {
public:
  // momenta ids are flat torus indices in [1, V); reps sorted ascending,
  // enumerated lexicographically so lookup is a binary search
  SectorBasis(const SpectralCache& cache, int n, int64_t size_limit = 5000000);

  int n() const { return n_; }
  int64_t size() const { return size_; }
  const SpectralCache& cache() const { return *cache_; }
  const int32_t* rep(int64_t i) const { return reps_.data() + size_t(i) * size_t(std::max(n_, 1)); }
  int64_t find(const int32_t* sorted_multiset) const;  // -1 if absent
  double weight(int64_t i) const { return weight_[size_t(i)]; }
  int ksum(int64_t i, int axis) const { return ksum_[size_t(i) * size_t(cache_->torus.d) + size_t(axis)]; }
  // Dhat evaluated at the total momentum of rep i
  double dhat_total(int64_t i) const { return dhat_total_[size_t(i)]; }

  static double mode_weight(const SpectralCache& cache, int64_t k);
  static double count_estimate(int64_t modes, int n);  // binomial size estimate

private:
  const SpectralCache* cache_;
  int n_ = 0;
  int64_t size_ = 0;
  std::vector<int32_t> reps_;      // size * max(n,1)
  std::vector<double> weight_;     // mult * prod W
  std::vector<int32_t> ksum_;      // size * d, total momentum coords mod L
  std::vector<double> dhat_total_;
};

// lazy family of sector bases sharing one cache
class SectorFamily {
public:
  explicit SectorFamily(const SpectralCache& cache, int64_t size_limit = 5000000)
      : cache_(&cache), limit_(size_limit) {}
  const SectorBasis& sector(int n);
  const SpectralCache& cache() const { return *cache_; }

private:
  const SpectralCache* cache_;
  int64_t limit_;
  std::map<int, std::unique_ptr<SectorBasis>> bases_;
};

struct GradedVector {
  const SectorBasis* basis = nullptr;
  std::vector<cplx> coef;
};

GradedVector gv_zero(const SectorBasis& b);
GradedVector gv_random(const SectorBasis& b, uint64_t seed);  // unit weighted norm
cplx gv_inner(const GradedVector& a, const GradedVector& b);
double gv_norm(const GradedVector& a);
void gv_axpy(GradedVector& y, cplx alpha, const GradedVector& x);
void gv_scale(GradedVector& y, cplx alpha);

GradedVector apply_creation(const GradedVector& in, const SectorBasis& out_basis, int axis,
                            int sign);
GradedVector apply_annihilation(const GradedVector& in, const SectorBasis& out_basis, int axis,
                                int sign);
GradedVector apply_shift(const GradedVector& in, int axis, int sign);
GradedVector apply_nabla(const GradedVector& in, int axis, int sign);
// |Delta|^{-1/2} nabla_e; multiset with zero total momentum maps to 0
GradedVector apply_half_inv_nabla(const GradedVector& in, int axis, int sign);
// |Delta|^{-1/2} alone (diagonal)
GradedVector apply_half_inv(const GradedVector& in);

// operator norm via power iteration on A* A in the weighted metric
struct NormEstimate {
  double norm = 0;
  int iters = 0;
  double resid = 0;  // ||A*A v - norm^2 v|| / norm^2 at the last iterate
};
NormEstimate operator_norm(const std::function<GradedVector(const GradedVector&)>& fwd,
                           const std::function<GradedVector(const GradedVector&)>& adj,
                           const SectorBasis& domain, uint64_t seed, int max_iters = 2000,
                           double tol = 1e-13);

double creation_norm_squared_reference(const SpectralCache& cache, int n);

NormEstimate creation_norm(SectorFamily& fam, int n, int axis, int sign, uint64_t seed);
NormEstimate annihilation_norm(SectorFamily& fam, int n, int axis, int sign, uint64_t seed);
// |Delta|^{-1/2} a*_e from sector n (bounded by C sqrt(n+1) with C from the
// integral bound below)
NormEstimate half_inv_creation_norm(SectorFamily& fam, int n, int axis, int sign,
                                    uint64_t seed);

// exact sup of the diagonal multiplier |exp(i theta) - 1| / sqrt(2 Dhat) on a sector
double half_inv_nabla_max(const SectorBasis& basis, int axis, int sign);

// adjointness residual |<a* u, v> - <u, a v>| / (||u|| ||v||) on random vectors
double adjoint_residual(SectorFamily& fam, int n, int axis, int sign, uint64_t seed);

// diagonal identity T_{-e} N_e + N_{-e} = 0 with N = |Delta|^{-1/2} nabla:
// returns the max absolute diagonal value of the sum on the sector
double shift_reflection_residual(const SectorBasis& basis, int axis, int sign);

// s(X) with X = a*_e + a_e applied to a window of sectors; even polynomial s
struct GradedWindow {
  int lo = 0;  // sector index of parts[0]
  std::vector<GradedVector> parts;
};
GradedWindow apply_s_of_x(SectorFamily& fam, const Poly& s, const GradedWindow& in, int axis,
                          int sign);

// norm of s(X) restricted to sector n plus the analytic ceiling
// sum_k |s_k| prod_{j<k} x_{n+j}, x_m = sqrt(v)(sqrt(m+1) + sqrt(m)),
// v = (1 - V^{-1}) / (2d)
struct SectorNormResult {
  NormEstimate estimate;
  double ceiling = 0;
};
SectorNormResult s_sector_norm(SectorFamily& fam, const Poly& s, int n, int axis, int sign,
                               uint64_t seed);

// I(q) = (2 pi)^{-d} int |exp(i p.e) - 1|^2 / (Dhat(p) Dhat(p + q)) dp scanned
// over the momentum grid of an Lq-torus (including q = 0); the shifted
// midpoint p-grid never hits either singularity
struct IntegralBoundResult {
  double sup_value = 0;   // finest level
  double sup_coarse = 0;
  double rel_drift = 0;   // |fine - coarse| / fine at the sup
  bool stable = false;    // rel_drift <= 2%
  std::vector<int> argmax_q;
};
IntegralBoundResult integral_bound_scan(int d, int axis, int Lq, int n_p, int threads = 1);

}  // namespace msaw
