#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qpool/matrix.hpp"
#include "qpool/spectrogram.hpp"

namespace qpool {

/// Interpolation rule for sample quantiles over sorted v_0 <= ... <= v_{N-1}.
enum class QuantileRule {
  Linear,   // h = (N-1) z          (default; z = 0 gives min, z = 1 gives max)
  Weibull,  // h = (N+1) z - 1, clamped to [0, N-1]; E[F(q)] = z for continuous data
};

std::string_view quantile_rule_name(QuantileRule rule) noexcept;
QuantileRule parse_quantile_rule(std::string_view name);

/// Quantile of already sorted values: v_floor(h) + frac(h) (v_floor(h)+1 - v_floor(h)).
double quantile_sorted(std::span<const double> sorted, double z,
                       QuantileRule rule = QuantileRule::Linear);

/// Throws EmptyInput for an empty set and DomainError for z outside [0, 1].
double quantile(std::span<const double> values, double z,
                QuantileRule rule = QuantileRule::Linear);

struct ReferenceSpectrogram {
  Matrix values;
  double z = 0.0;
  std::uint32_t training_count = 0;
  std::string fingerprint;
  QuantileRule rule = QuantileRule::Linear;
};

/// Entry-wise z-quantile over the training spectrograms. All inputs must share
/// shape (ShapeMismatch) and fingerprint (ConfigMismatch).
ReferenceSpectrogram build_reference(std::span<const Spectrogram> training, double z,
                                     QuantileRule rule = QuantileRule::Linear,
                                     std::size_t jobs = 1);

/// One reference per level in `levels`, sorting each entry's column once.
/// Result i equals build_reference(training, levels[i]) exactly.
std::vector<ReferenceSpectrogram> build_references(std::span<const Spectrogram* const> training,
                                                   std::span<const double> levels,
                                                   QuantileRule rule = QuantileRule::Linear,
                                                   std::size_t jobs = 1);

// QREF1 container: "QREF", u8 version, f64 z, u32 training_count, u32 rows,
// u32 cols, f64 values (row-major), u32-prefixed JSON metadata.
std::vector<std::uint8_t> encode_reference(const ReferenceSpectrogram& ref);
ReferenceSpectrogram decode_reference(std::span<const std::uint8_t> bytes);
void save_reference(const ReferenceSpectrogram& ref, const std::filesystem::path& path);
ReferenceSpectrogram load_reference(const std::filesystem::path& path);

}  // namespace qpool
