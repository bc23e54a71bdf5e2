#pragma once
// continuous-time walk in its running local-time landscape. from site x the
// walk jumps to neighbor y at rate w(ell(x) - ell(y)), and ell grows at unit
// rate at the occupied site. between jumps the total hazard
//   Lambda(tau) = sum_j [W(u_j + tau) - W(u_j)],  u_j = ell(x) - ell(nb_j(x)),
// is a polynomial (W = antiderivative of w), so jump times come from exact
// inversion of Lambda against an Exp(1) draw (safeguarded newton); an
// independent thinning sampler is kept for cross-validation.
//
// the decomposition X(t) = N(t) + int phi_bar + int phi_tilde + M(t) is
// accumulated in closed form: N is the gamma-thinned jump martingale and the
// two compensator integrals use the antiderivatives S and R between jumps.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "msaw/field.hpp"
#include "msaw/rate.hpp"
#include "msaw/rng.hpp"
#include "msaw/stats.hpp"

namespace msaw {

enum class JumpMode { inversion, thinning };

struct WalkOptions {
  JumpMode mode = JumpMode::inversion;
  int64_t recenter_stride = 1000000;  // re-pin the local-time mean every so many jumps
};

struct Observation {
  double t = 0;
  std::array<int64_t, kMaxDim> x{};          // unwrapped displacement
  std::array<int64_t, kMaxDim> nmart{};      // thinned direction martingale
  std::array<double, kMaxDim> comp_bar{};    // int_0^t [s(u_{+l}) - s(u_{-l})] ds
  std::array<double, kMaxDim> comp_tilde{};  // int_0^t [r(u_{+l}) - r(u_{-l})] ds
  std::array<double, 2 * kMaxDim> grad{};    // u_j = eta(0) - eta(e_j) at time t
  uint64_t jumps = 0;
};

class Walker {
public:
  // initial local-time profile in walker-centered coordinates (walker at flat
  // index 0); the field is copied and re-centered
  Walker(const RateSpec& spec, const TorusField& init, uint64_t seed,
         const WalkOptions& opt = {});

  double time() const { return t_; }
  int64_t site() const { return site_; }
  uint64_t jumps() const { return jumps_; }
  bool wrapped() const { return wrapped_; }
  double u(int j) const { return u_[size_t(j)]; }

  double cumulative_hazard(double tau) const;  // Lambda(tau) from the current state
  double rate_sum(double tau) const;           // Lambda'(tau) = sum_j w(u_j + tau)

  struct Jump {
    double tau = 0;
    int dir = 0;
  };
  Jump sample_jump_inversion(double target);  // solve Lambda(tau) = target
  Jump sample_jump_thinning();                // windowed majorant + ogata thinning
  Jump next_jump();                           // per configured mode
  void apply_jump(const Jump& jp);
  void hold(double dt);  // accrue local time without jumping (horizon close-out)

  // state at lag sigma into the current holding interval (0 <= sigma <= next tau)
  Observation observe(double sigma) const;

  // local-time field in walker-centered coordinates, re-centered
  TorusField environment() const;

  // engine state as the standard whitespace-separated decimal stream
  std::string rng_state() const;

private:
  void refresh_gradients();

  RateSpec spec_;
  Poly w_;          // full rate polynomial
  Poly big_w_;      // antiderivative of w
  Poly big_r_;      // antiderivative of r
  Poly big_s_;      // antiderivative of s
  Poly w_abs_d_;    // |coefficient| majorant of w' (thinning window bound)
  Torus torus_;
  std::vector<int32_t> nb_;
  std::vector<double> ell_;
  int64_t site_ = 0;
  double t_ = 0;
  std::array<int64_t, kMaxDim> x_{};
  std::array<int64_t, kMaxDim> nmart_{};
  std::array<KahanSum, kMaxDim> comp_bar_{};
  std::array<KahanSum, kMaxDim> comp_tilde_{};
  std::array<double, 2 * kMaxDim> u_{};
  uint64_t jumps_ = 0;
  bool wrapped_ = false;
  WalkOptions opt_;
  Rng rng_;
};

struct WalkResult {
  std::vector<Observation> obs;
  uint64_t jumps = 0;
  bool wrapped = false;  // |x|_inf exceeded L/4: displacement wound around the torus
  TorusField final_env;
  double final_time = 0;
  std::array<int64_t, kMaxDim> final_x{};
  std::string rng_state;  // engine state at the horizon (continuation checkpoint)
};

// run to T recording the state at each obs_time (sorted, within [0, T])
WalkResult run_walk(const RateSpec& spec, const TorusField& init, double T,
                    const std::vector<double>& obs_times, uint64_t seed,
                    const WalkOptions& opt = {});

// final-state checkpoint on disk: header (t, unwrapped X, jump count, rng
// state) followed by the environment in the standard field layout
struct FinalState {
  double t = 0;
  std::array<int64_t, kMaxDim> x{};
  uint64_t jumps = 0;
  std::string rng_state;
  TorusField env;
};

void save_final_state(const FinalState& st, const std::string& path);
FinalState load_final_state(const std::string& path);

}  // namespace msaw
