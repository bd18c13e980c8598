#include "fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <new>

namespace qpool::detail {

namespace {
// The FFTW planner is not thread-safe; execution on distinct buffers is.
std::mutex planner_mutex;
}  // namespace

RealDftMagnitude::RealDftMagnitude(std::size_t n) : n_(n) {
  std::lock_guard lock(planner_mutex);
  in_ = fftw_alloc_real(n);
  auto* out = fftw_alloc_complex(n / 2 + 1);
  out_ = out;
  // ESTIMATE keeps the chosen algorithm, and so the rounding, the same on every run.
  plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out, FFTW_ESTIMATE);
  if (!in_ || !out || !plan_) {
    fftw_free(in_);
    fftw_free(out);
    throw std::bad_alloc();
  }
}

RealDftMagnitude::~RealDftMagnitude() {
  std::lock_guard lock(planner_mutex);
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  fftw_free(in_);
  fftw_free(out_);
}

void RealDftMagnitude::operator()(std::span<const double> frame, std::span<double> out) {
  for (std::size_t i = 0; i < n_; ++i) in_[i] = frame[i];
  fftw_execute(static_cast<fftw_plan>(plan_));
  const auto* x = static_cast<const fftw_complex*>(out_);
  for (std::size_t f = 0; f <= n_ / 2; ++f) out[f] = std::hypot(x[f][0], x[f][1]);
}

}  // namespace qpool::detail
