#include "msaw/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

namespace msaw {

namespace {
// fftw plan creation/destruction is not thread-safe
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

TorusFft::TorusFft(const Torus& t) : torus_(t) {
  const int64_t v = torus_.volume();
  buf_ = fftw_malloc(sizeof(fftw_complex) * size_t(v));
  if (!buf_) throw std::bad_alloc();
  int dims[kMaxDim];
  for (int i = 0; i < torus_.d; ++i) dims[i] = torus_.L;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto* b = static_cast<fftw_complex*>(buf_);
  // FFTW_FORWARD kernel is exp(-i 2 pi k x / L): our position transform.
  plan_mom_to_pos_ = fftw_plan_dft(torus_.d, dims, b, b, FFTW_FORWARD, FFTW_ESTIMATE);
  plan_pos_to_mom_ = fftw_plan_dft(torus_.d, dims, b, b, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!plan_mom_to_pos_ || !plan_pos_to_mom_) {
    fftw_free(buf_);
    throw std::runtime_error("fftw plan creation failed");
  }
}

TorusFft::~TorusFft() {
  std::lock_guard<std::mutex> lock(plan_mutex());
  if (plan_mom_to_pos_) fftw_destroy_plan(static_cast<fftw_plan>(plan_mom_to_pos_));
  if (plan_pos_to_mom_) fftw_destroy_plan(static_cast<fftw_plan>(plan_pos_to_mom_));
  if (buf_) fftw_free(buf_);
}

void TorusFft::execute(void* plan, std::vector<std::complex<double>>& a, double scale) const {
  const size_t v = size_t(torus_.volume());
  if (a.size() != v) throw std::invalid_argument("fft: array size does not match torus volume");
  auto* b = static_cast<fftw_complex*>(buf_);
  std::memcpy(b, a.data(), v * sizeof(fftw_complex));
  fftw_execute(static_cast<fftw_plan>(plan));
  std::memcpy(a.data(), b, v * sizeof(fftw_complex));
  if (scale != 1.0)
    for (auto& z : a) z *= scale;
}

void TorusFft::to_momentum(std::vector<std::complex<double>>& a) const {
  execute(plan_pos_to_mom_, a, 1.0);
}

void TorusFft::to_position(std::vector<std::complex<double>>& a) const {
  execute(plan_mom_to_pos_, a, 1.0 / double(torus_.volume()));
}

}  // namespace msaw
