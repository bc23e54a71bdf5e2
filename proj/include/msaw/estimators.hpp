#pragma once
// replica ensembles of the walk and the statistical battery run on them.
// replica i always uses seeds derived from splitmix64_at(master, 2i) and
// (..., 2i+1) (walk / initial environment), and rows are stored in replica
// order, so results are independent of the thread count.

#include <cstdint>
#include <string>
#include <vector>

#include "msaw/gibbs.hpp"
#include "msaw/rate.hpp"
#include "msaw/stats.hpp"
#include "msaw/walk.hpp"

namespace msaw {

enum class InitKind { flat, stationary };

struct EnsembleParams {
  double T = 0;
  std::vector<double> obs_times;  // sorted, within [0, T]
  int64_t replicas = 0;
  uint64_t master_seed = 0;
  int threads = 1;
  InitKind init = InitKind::flat;
  JumpMode mode = JumpMode::inversion;
  McmcOptions mcmc;  // used when init == stationary and r is nonlinear
};

struct ReplicaRow {
  uint32_t replica = 0;
  uint64_t jumps = 0;
  bool wrapped = false;
  // time-major flats: x/nmart/cbar/ctil are nt x d, grad is nt x 2d
  std::vector<double> x, nmart, cbar, ctil, grad;
};

struct Ensemble {
  Torus torus;
  RateSpec spec;
  double T = 0;
  std::vector<double> times;
  std::vector<ReplicaRow> rows;

  int d() const { return torus.d; }
  size_t nt() const { return times.size(); }
  double x(size_t i, size_t ti, int l) const { return rows[i].x[ti * size_t(d()) + size_t(l)]; }
  double nmart(size_t i, size_t ti, int l) const { return rows[i].nmart[ti * size_t(d()) + size_t(l)]; }
  double cbar(size_t i, size_t ti, int l) const { return rows[i].cbar[ti * size_t(d()) + size_t(l)]; }
  double ctil(size_t i, size_t ti, int l) const { return rows[i].ctil[ti * size_t(d()) + size_t(l)]; }
  double grad(size_t i, size_t ti, int j) const { return rows[i].grad[ti * size_t(2 * d()) + size_t(j)]; }
  size_t time_index(double t) const;  // exact match required
};

Ensemble run_ensemble(const RateSpec& spec, const Torus& torus, const EnsembleParams& par);

struct CheckLine {
  std::string name;
  double value = 0;
  double se = 0;
  double reference = 0;
  double tol = 0;  // pass iff |value - reference| <= tol (one_sided: value - reference <= tol)
  bool one_sided = false;
  bool ok = false;
};

struct CheckReport {
  bool ok = true;
  std::vector<CheckLine> lines;
  void add(const std::string& name, double value, double se, double reference, double tol,
           bool one_sided = false);
  void merge(const CheckReport& o);
};

// mean displacement per unit time vanishes (z * se two-sided band, default 99%)
CheckReport lln_check(const Ensemble& e, double z = 2.576);

// E|X(t)|^2 against an explicit reference at one observation time
CheckReport msd_check(const Ensemble& e, size_t ti, double reference, double nsigma);

// a(t) = E|X(t)|^2 / (2 d t) >= gamma - nsigma * se at each listed time
CheckReport diffusive_lower_check(const Ensemble& e, double gamma,
                                  const std::vector<size_t>& tis, double nsigma = 3);

// least-squares slope of a(t) over the listed times is 0 within nsigma
CheckReport plateau_check(const Ensemble& e, const std::vector<size_t>& tis, double nsigma = 3);

struct SigmaEstimate {
  double value[kMaxDim][kMaxDim] = {};
  double se[kMaxDim][kMaxDim] = {};
};
SigmaEstimate sigma_estimate(const Ensemble& e, size_t ti);

// off-diagonal covariances vanish and diagonal entries agree pairwise
CheckReport isotropy_check(const Ensemble& e, size_t ti, double nsigma = 3);

// component skewness and excess kurtosis vanish
CheckReport clt_shape_check(const Ensemble& e, size_t ti, double nsigma = 3);

// cov(X_l(t_half), X_l(t_full)) == var(X_l(t_half)): independent-increment scaling
CheckReport clt_crosstime_check(const Ensemble& e, size_t ti_half, size_t ti_full,
                                double nsigma = 3);

// anderson-darling p-value on X_1(t); informational, never gates
CheckReport gaussianity_advisory(const Ensemble& e, size_t ti);

// mean of X - int phi_bar - int phi_tilde vanishes, and the thinned direction
// martingale is uncorrelated with the remainder
CheckReport martingale_check(const Ensemble& e, size_t ti, double nsigma = 3);

// moments of the walker-site gradients agree between two observation times
CheckReport stationarity_check(const Ensemble& e, size_t ti0, size_t ti1, int max_order = 4,
                               double nsigma = 3);

// time-reversal pairing E[A(0)^p B(t)^q] = (-1)^{p+q} E[A(t)^p B(0)^q]
// with A, B two distinct walker-site gradients
CheckReport reversal_check(const Ensemble& e, size_t ti0, size_t ti1, double nsigma = 3);

// gradient-functional spectrum across a field ensemble. per replica the
// functional g is evaluated sitewise, its spatial mean removed, and
// chat_rep(k) = |fft(g)|^2 / V; replica mean +/- se per momentum.
enum class GradFunctional { dipole, dipole_square, odd_rate };

struct ChatEstimate {
  Torus torus;
  std::vector<double> chat, chat_se;
  std::vector<double> cx;  // position-space covariance from the mean spectrum
  double sup_abs = 0;
  int64_t arg_sup = 0;
  double infrared = 0;  // V^{-1} sum_{k!=0} chat(k) / Dhat(k)
};

ChatEstimate chat_estimate(const std::vector<TorusField>& fields, GradFunctional kind,
                           int axis, const RateSpec* spec = nullptr);

}  // namespace msaw
