#pragma once

// Independent brute-force oracles. Nothing here calls into the library's
// numeric paths; each routine is the textbook definition.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "qpool/audio_io.hpp"

namespace oracle {

/// |DFT| bins 0..n/2 of a real frame, O(n^2) in long double.
inline std::vector<double> dft_magnitude(const std::vector<double>& frame) {
  const std::size_t n = frame.size();
  std::vector<double> out(n / 2 + 1);
  for (std::size_t f = 0; f <= n / 2; ++f) {
    long double re = 0, im = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const long double angle = -2.0L * std::numbers::pi_v<long double> *
                                static_cast<long double>((f * t) % n) / static_cast<long double>(n);
      re += frame[t] * std::cos(angle);
      im += frame[t] * std::sin(angle);
    }
    out[f] = static_cast<double>(std::sqrt(re * re + im * im));
  }
  return out;
}

/// Centered STFT magnitude built from the definition: zero-pad n/2 each side,
/// periodic Hann, naive DFT per frame. Result is [bin][frame].
inline std::vector<std::vector<double>> stft(const std::vector<double>& signal, std::size_t n,
                                             std::size_t hop) {
  std::vector<double> padded(n / 2, 0.0);
  padded.insert(padded.end(), signal.begin(), signal.end());
  padded.insert(padded.end(), n / 2, 0.0);
  const std::size_t frames = 1 + signal.size() / hop;
  std::vector<std::vector<double>> out(n / 2 + 1, std::vector<double>(frames));
  for (std::size_t t = 0; t < frames; ++t) {
    std::vector<double> frame(n);
    for (std::size_t i = 0; i < n; ++i) {
      const long double w =
          0.5L - 0.5L * std::cos(2.0L * std::numbers::pi_v<long double> * i / n);
      frame[i] = static_cast<double>(padded[t * hop + i] * w);
    }
    const auto mag = dft_magnitude(frame);
    for (std::size_t f = 0; f < mag.size(); ++f) out[f][t] = mag[f];
  }
  return out;
}

/// Sort, then interpolate at h = (N-1) z.
inline double quantile(std::vector<double> v, double z) {
  std::sort(v.begin(), v.end());
  const double h = static_cast<double>(v.size() - 1) * z;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (h - std::floor(h)) * (v[lo + 1] - v[lo]);
}

/// AUC from all (positive, negative) pairs; ties count one half.
inline double pairwise_auc(const std::vector<double>& scores, const std::vector<qpool::Label>& labels) {
  std::int64_t twice = 0, pos = 0, neg = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] == qpool::Label::Anormal) ++pos; else ++neg;
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != qpool::Label::Anormal) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != qpool::Label::Normal) continue;
      twice += scores[i] > scores[j] ? 2 : (scores[i] == scores[j] ? 1 : 0);
    }
  }
  return static_cast<double>(twice) / static_cast<double>(2 * pos * neg);
}

using Rational = boost::multiprecision::cpp_rational;
using boost::multiprecision::cpp_int;

inline cpp_int choose(unsigned n, unsigned k) {
  cpp_int c = 1;
  for (unsigned i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

/// Exact P(K = k), K ~ Binomial(n, 1 - z), with z = z_num / z_den.
inline Rational pmf(unsigned k, unsigned n, unsigned z_num, unsigned z_den) {
  const Rational z(z_num, z_den);
  const Rational p = Rational(1) - z;
  Rational out = Rational(choose(n, k));
  for (unsigned i = 0; i < k; ++i) out *= p;
  for (unsigned i = 0; i < n - k; ++i) out *= z;
  return out;
}

/// log of a positive rational, accurate for values far below double range.
inline double log_rational(const Rational& r) {
  using Float = boost::multiprecision::cpp_bin_float_50;
  return static_cast<double>(boost::multiprecision::log(Float(r)));
}

/// -log P(K >= k), evaluated as -log1p(-P(K < k)) when the tail is large.
inline double tail_score(unsigned k, unsigned n, unsigned z_num, unsigned z_den) {
  Rational upper = 0;
  for (unsigned i = k; i <= n; ++i) upper += pmf(i, n, z_num, z_den);
  const Rational lower = Rational(1) - upper;
  if (lower == 0) return 0.0;
  if (upper > Rational(1, 2)) {
    using Float = boost::multiprecision::cpp_bin_float_50;
    return -static_cast<double>(boost::multiprecision::log1p(-Float(lower)));
  }
  return -log_rational(upper);
}

/// Periodic Hann in 50-digit arithmetic.
inline double hann(std::size_t k, std::size_t n) {
  using Float = boost::multiprecision::cpp_bin_float_50;
  const Float pi = boost::math::constants::pi<Float>();
  return static_cast<double>(Float(0.5) * (1 - cos(2 * pi * Float(k) / Float(n))));
}

}  // namespace oracle
