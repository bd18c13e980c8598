#pragma once

#include <cstddef>
#include <span>

namespace qpool::detail {

/// Magnitudes |X[f]|, f = 0..n/2, of the length-n DFT of a real frame (FFTW r2c).
/// One instance per thread; construction and destruction may run concurrently.
class RealDftMagnitude {
 public:
  explicit RealDftMagnitude(std::size_t n);
  ~RealDftMagnitude();
  RealDftMagnitude(const RealDftMagnitude&) = delete;
  RealDftMagnitude& operator=(const RealDftMagnitude&) = delete;

  void operator()(std::span<const double> frame, std::span<double> out);

 private:
  std::size_t n_;
  double* in_ = nullptr;
  void* out_ = nullptr;   // fftw_complex[n/2 + 1]
  void* plan_ = nullptr;  // fftw_plan
};

}  // namespace qpool::detail
