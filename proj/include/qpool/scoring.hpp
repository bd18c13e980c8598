#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "qpool/matrix.hpp"
#include "qpool/reference.hpp"
#include "qpool/spectrogram.hpp"

namespace qpool {

/// Entry-wise positive part of (test - reference), in dB.
struct DifferenceSpectrogram {
  Matrix values;
  std::size_t exceedance_count = 0;  // k: entries strictly greater than zero
  std::string source_id;
  std::string fingerprint;
  double z = 0.0;

  std::size_t entry_count() const noexcept { return values.size(); }
};

enum class Metric { Counting, Sum, Mean, Binomial };

inline constexpr std::array<Metric, 4> kAllMetrics = {Metric::Counting, Metric::Sum, Metric::Mean,
                                                      Metric::Binomial};

std::string_view metric_name(Metric metric) noexcept;
/// Case-insensitive: counting, sum, mean, binomial.
Metric parse_metric(std::string_view name);

/// Larger value means more anomalous for every metric.
struct AnomalyScore {
  Metric metric = Metric::Counting;
  double value = 0.0;
  std::size_t k = 0;
  std::size_t n = 0;
  double z = 0.0;
  /// log C(n,k) + k log(1-z) + (n-k) log z; present whenever 0 < z < 1.
  std::optional<double> log_pmf;
};

DifferenceSpectrogram difference_spectrogram(const Spectrogram& test,
                                             const ReferenceSpectrogram& reference);

AnomalyScore score_counting(const DifferenceSpectrogram& diff);
AnomalyScore score_sum(const DifferenceSpectrogram& diff);
/// Mean over strictly positive entries; 0 when there are none.
AnomalyScore score_mean(const DifferenceSpectrogram& diff);

/// log P(K = k) for K ~ Binomial(n, 1 - z), via log-gamma.
double binomial_log_pmf(std::size_t k, std::size_t n, double z);

/// -log P(K >= k) for K ~ Binomial(n, 1 - z). Zero at k = 0, non-decreasing in k.
double binomial_tail_score(std::size_t k, std::size_t n, double z);

/// value = binomial_tail_score, log_pmf = binomial_log_pmf.
/// DomainError unless k <= n and 0 < z < 1.
AnomalyScore score_binomial(std::size_t k, std::size_t n, double z);

AnomalyScore score_difference(const DifferenceSpectrogram& diff, Metric metric);
AnomalyScore score(const Spectrogram& test, const ReferenceSpectrogram& reference, Metric metric);

enum class ExplainFormat { Matrix, Image };

/// Matrix: SPEC1 container of the difference values.
/// Image: 16-bit binary PGM (P5), width = frames, height = bins, bin 0 on the
/// bottom row, intensity linear in [0, max(D)].
void export_explanation(const DifferenceSpectrogram& diff, const std::filesystem::path& path,
                        ExplainFormat format);

}  // namespace qpool
