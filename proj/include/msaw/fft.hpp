#pragma once
// d-dimensional FFT on the torus (FFTW backend). conventions:
//   to_momentum: fhat(k) = sum_x exp(+i p_k . x) f(x)        (unnormalized)
//   to_position: f(x)    = V^{-1} sum_k exp(-i p_k . x) fhat(k)
// with p_k = 2 pi k / L componentwise, so to_position(to_momentum(f)) == f.
// a TorusFft instance is not thread-safe; each thread builds its own (plans
// use FFTW_ESTIMATE so construction is cheap and, per fixed platform, the
// transform output is reproducible).

#include <complex>
#include <vector>

#include "msaw/torus.hpp"

namespace msaw {

class TorusFft {
public:
  explicit TorusFft(const Torus& t);
  ~TorusFft();
  TorusFft(const TorusFft&) = delete;
  TorusFft& operator=(const TorusFft&) = delete;

  const Torus& torus() const { return torus_; }
  void to_momentum(std::vector<std::complex<double>>& a) const;
  void to_position(std::vector<std::complex<double>>& a) const;

private:
  void execute(void* plan, std::vector<std::complex<double>>& a, double scale) const;

  Torus torus_;
  void* plan_pos_to_mom_ = nullptr;
  void* plan_mom_to_pos_ = nullptr;
  void* buf_ = nullptr;  // fftw-aligned work buffer, one transform at a time
};

}  // namespace msaw
