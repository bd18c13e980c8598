#include "qpool/scoring.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "binary_io.hpp"
#include "qpool/error.hpp"
#include "spec_container.hpp"

namespace qpool {

std::string_view metric_name(Metric metric) noexcept {
  switch (metric) {
    case Metric::Counting: return "counting";
    case Metric::Sum: return "sum";
    case Metric::Mean: return "mean";
    case Metric::Binomial: return "binomial";
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (Metric m : kAllMetrics) {
    if (metric_name(m) == lower) return m;
  }
  throw Error(ErrorKind::InvalidConfig, "unknown metric '" + std::string(name) + "'");
}

DifferenceSpectrogram difference_spectrogram(const Spectrogram& test,
                                             const ReferenceSpectrogram& reference) {
  if (!test.values.same_shape(reference.values)) {
    throw Error(ErrorKind::ShapeMismatch,
                "'" + test.source_id + "' is " + std::to_string(test.values.rows) + "x" +
                    std::to_string(test.values.cols) + ", reference is " +
                    std::to_string(reference.values.rows) + "x" +
                    std::to_string(reference.values.cols));
  }
  if (test.fingerprint != reference.fingerprint) {
    throw Error(ErrorKind::ConfigMismatch, "'" + test.source_id + "' fingerprint " +
                                               test.fingerprint + " differs from reference " +
                                               reference.fingerprint);
  }
  DifferenceSpectrogram diff;
  diff.values = Matrix(test.values.rows, test.values.cols);
  diff.source_id = test.source_id;
  diff.fingerprint = reference.fingerprint;
  diff.z = reference.z;
  std::size_t k = 0;
  for (std::size_t j = 0; j < diff.values.size(); ++j) {
    const double d = std::max(0.0, test.values.data[j] - reference.values.data[j]);
    diff.values.data[j] = d;
    k += d > 0.0 ? 1 : 0;
  }
  diff.exceedance_count = k;
  return diff;
}

namespace {

AnomalyScore base_score(const DifferenceSpectrogram& diff, Metric metric) {
  AnomalyScore s;
  s.metric = metric;
  s.k = diff.exceedance_count;
  s.n = diff.entry_count();
  s.z = diff.z;
  if (diff.z > 0.0 && diff.z < 1.0) s.log_pmf = binomial_log_pmf(s.k, s.n, s.z);
  return s;
}

double positive_sum(const DifferenceSpectrogram& diff) {
  double sum = 0.0;
  for (double d : diff.values.data) {
    if (d > 0.0) sum += d;
  }
  return sum;
}

void check_binomial_args(std::size_t k, std::size_t n, double z) {
  if (k > n) {
    throw Error(ErrorKind::DomainError,
                "exceedance count " + std::to_string(k) + " exceeds n = " + std::to_string(n));
  }
  if (!(z > 0.0 && z < 1.0)) {
    throw Error(ErrorKind::DomainError,
                "binomial metric needs 0 < z < 1, got " + std::to_string(z));
  }
}

double log_choose(std::size_t n, std::size_t k) {
  using boost::math::lgamma;
  return lgamma(static_cast<double>(n) + 1.0) - lgamma(static_cast<double>(k) + 1.0) -
         lgamma(static_cast<double>(n - k) + 1.0);
}

}  // namespace

AnomalyScore score_counting(const DifferenceSpectrogram& diff) {
  AnomalyScore s = base_score(diff, Metric::Counting);
  s.value = static_cast<double>(s.k);
  return s;
}

AnomalyScore score_sum(const DifferenceSpectrogram& diff) {
  AnomalyScore s = base_score(diff, Metric::Sum);
  s.value = positive_sum(diff);
  return s;
}

AnomalyScore score_mean(const DifferenceSpectrogram& diff) {
  AnomalyScore s = base_score(diff, Metric::Mean);
  s.value = s.k == 0 ? 0.0 : positive_sum(diff) / static_cast<double>(s.k);
  return s;
}

double binomial_log_pmf(std::size_t k, std::size_t n, double z) {
  check_binomial_args(k, n, z);
  const double log_p = std::log1p(-z);  // exceedance probability 1 - z
  const double log_q = std::log(z);
  double out = log_choose(n, k);
  if (k > 0) out += static_cast<double>(k) * log_p;
  if (n > k) out += static_cast<double>(n - k) * log_q;
  return out;
}

double binomial_tail_score(std::size_t k, std::size_t n, double z) {
  check_binomial_args(k, n, z);
  if (k == 0) return 0.0;
  const double p = 1.0 - z;
  const double odds = p / z;
  const auto mode = static_cast<std::size_t>(std::floor((static_cast<double>(n) + 1.0) * p));

  // Both branches sum pmf terms relative to the first one; the terms shrink
  // monotonically away from the mode, so the loop stops once they are negligible.
  if (k > mode) {
    double term = 1.0;
    double sum = 1.0;
    for (std::size_t i = k; i < n; ++i) {
      term *= static_cast<double>(n - i) / static_cast<double>(i + 1) * odds;
      sum += term;
      if (term < sum * 1e-17) break;
    }
    return -(binomial_log_pmf(k, n, z) + std::log(sum));
  }
  double term = 1.0;
  double sum = 1.0;
  for (std::size_t i = k - 1; i > 0; --i) {
    term *= static_cast<double>(i) / static_cast<double>(n - i + 1) / odds;
    sum += term;
    if (term < sum * 1e-17) break;
  }
  const double lower = std::exp(binomial_log_pmf(k - 1, n, z) + std::log(sum));
  return -std::log1p(-std::min(lower, 1.0));
}

AnomalyScore score_binomial(std::size_t k, std::size_t n, double z) {
  AnomalyScore s;
  s.metric = Metric::Binomial;
  s.k = k;
  s.n = n;
  s.z = z;
  s.log_pmf = binomial_log_pmf(k, n, z);
  s.value = binomial_tail_score(k, n, z);
  return s;
}

AnomalyScore score_difference(const DifferenceSpectrogram& diff, Metric metric) {
  switch (metric) {
    case Metric::Counting: return score_counting(diff);
    case Metric::Sum: return score_sum(diff);
    case Metric::Mean: return score_mean(diff);
    case Metric::Binomial: return score_binomial(diff.exceedance_count, diff.entry_count(), diff.z);
  }
  throw Error(ErrorKind::InvalidConfig, "unknown metric");
}

AnomalyScore score(const Spectrogram& test, const ReferenceSpectrogram& reference, Metric metric) {
  return score_difference(difference_spectrogram(test, reference), metric);
}

void export_explanation(const DifferenceSpectrogram& diff, const std::filesystem::path& path,
                        ExplainFormat format) {
  if (format == ExplainFormat::Matrix) {
    const nlohmann::json meta = {{"source_id", diff.source_id},
                                 {"fingerprint", diff.fingerprint},
                                 {"kind", "difference"},
                                 {"z", diff.z},
                                 {"exceedance_count", diff.exceedance_count}};
    detail::write_file(path, detail::encode_spec1(diff.values, meta));
    return;
  }

  const Matrix& m = diff.values;
  double peak = 0.0;
  for (double d : m.data) peak = std::max(peak, d);
  const std::string header =
      "P5\n" + std::to_string(m.cols) + " " + std::to_string(m.rows) + "\n65535\n";
  detail::ByteWriter w;
  w.bytes(header);
  for (std::size_t y = 0; y < m.rows; ++y) {
    const std::size_t bin = m.rows - 1 - y;
    for (std::size_t t = 0; t < m.cols; ++t) {
      const double level = peak > 0.0 ? std::round(m(bin, t) / peak * 65535.0) : 0.0;
      const auto px = static_cast<std::uint16_t>(std::clamp(level, 0.0, 65535.0));
      w.u8(static_cast<std::uint8_t>(px >> 8));  // PGM samples are big-endian
      w.u8(static_cast<std::uint8_t>(px & 0xFF));
    }
  }
  detail::write_file(path, w.buffer());
}

}  // namespace qpool
