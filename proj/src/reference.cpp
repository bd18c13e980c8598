#include "qpool/reference.hpp"

#include <algorithm>
#include <cmath>

#include "binary_io.hpp"
#include "qpool/error.hpp"
#include "qpool/parallel.hpp"
#include "spec_container.hpp"

namespace qpool {

std::string_view quantile_rule_name(QuantileRule rule) noexcept {
  return rule == QuantileRule::Linear ? "linear" : "weibull";
}

QuantileRule parse_quantile_rule(std::string_view name) {
  if (name == "linear") return QuantileRule::Linear;
  if (name == "weibull") return QuantileRule::Weibull;
  throw Error(ErrorKind::InvalidConfig, "unknown quantile rule '" + std::string(name) + "'");
}

namespace {

void check_level(double z) {
  if (!(z >= 0.0 && z <= 1.0)) {
    throw Error(ErrorKind::DomainError, "quantile level must lie in [0, 1], got " +
                                            std::to_string(z));
  }
}

}  // namespace

double quantile_sorted(std::span<const double> v, double z, QuantileRule rule) {
  const std::size_t n = v.size();
  double h = 0.0;
  if (rule == QuantileRule::Linear) {
    h = static_cast<double>(n - 1) * z;
  } else {
    h = std::clamp(static_cast<double>(n + 1) * z - 1.0, 0.0, static_cast<double>(n - 1));
  }
  const double lower = std::floor(h);
  const auto lo = static_cast<std::size_t>(lower);
  if (lo + 1 >= n) return v[n - 1];
  const double frac = h - lower;
  if (frac == 0.0) return v[lo];
  const double step = v[lo + 1] - v[lo];
  const double q = std::isfinite(step) ? v[lo] + frac * step
                                       : (1.0 - frac) * v[lo] + frac * v[lo + 1];
  // Rounding in the interpolation must not escape the bracketing order statistics.
  return std::clamp(q, v[lo], v[lo + 1]);
}

double quantile(std::span<const double> values, double z, QuantileRule rule) {
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "quantile of an empty set");
  check_level(z);
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return quantile_sorted(sorted, z, rule);
}

std::vector<ReferenceSpectrogram> build_references(std::span<const Spectrogram* const> training,
                                                   std::span<const double> levels,
                                                   QuantileRule rule, std::size_t jobs) {
  if (training.empty()) throw Error(ErrorKind::EmptyInput, "no training spectrograms");
  for (double z : levels) check_level(z);
  const Spectrogram& first = *training.front();
  for (const Spectrogram* s : training) {
    if (!s->values.same_shape(first.values)) {
      throw Error(ErrorKind::ShapeMismatch,
                  "training spectrogram '" + s->source_id + "' is " +
                      std::to_string(s->values.rows) + "x" + std::to_string(s->values.cols) +
                      ", expected " + std::to_string(first.values.rows) + "x" +
                      std::to_string(first.values.cols));
    }
    if (s->fingerprint != first.fingerprint) {
      throw Error(ErrorKind::ConfigMismatch, "training spectrogram '" + s->source_id +
                                                 "' has fingerprint " + s->fingerprint +
                                                 ", expected " + first.fingerprint);
    }
  }

  std::vector<ReferenceSpectrogram> refs(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    refs[i].values = Matrix(first.values.rows, first.values.cols);
    refs[i].z = levels[i];
    refs[i].training_count = static_cast<std::uint32_t>(training.size());
    refs[i].fingerprint = first.fingerprint;
    refs[i].rule = rule;
  }

  // Entries are processed in blocks: gather a block of columns, then sort each.
  constexpr std::size_t kBlock = 256;
  const std::size_t entries = first.values.size();
  const std::size_t samples = training.size();
  const std::size_t blocks = (entries + kBlock - 1) / kBlock;
  parallel_for(blocks, jobs, [&](std::size_t b) {
    const std::size_t begin = b * kBlock;
    const std::size_t end = std::min(entries, begin + kBlock);
    std::vector<double> column((end - begin) * samples);
    for (std::size_t i = 0; i < samples; ++i) {
      const double* src = training[i]->values.data.data();
      for (std::size_t j = begin; j < end; ++j) column[(j - begin) * samples + i] = src[j];
    }
    for (std::size_t j = begin; j < end; ++j) {
      const std::span<double> col(column.data() + (j - begin) * samples, samples);
      std::sort(col.begin(), col.end());
      for (std::size_t l = 0; l < levels.size(); ++l) {
        refs[l].values.data[j] = quantile_sorted(col, levels[l], rule);
      }
    }
  });
  return refs;
}

ReferenceSpectrogram build_reference(std::span<const Spectrogram> training, double z,
                                     QuantileRule rule, std::size_t jobs) {
  std::vector<const Spectrogram*> ptrs;
  ptrs.reserve(training.size());
  for (const auto& s : training) ptrs.push_back(&s);
  const double levels[] = {z};
  return std::move(build_references(ptrs, levels, rule, jobs).front());
}

std::vector<std::uint8_t> encode_reference(const ReferenceSpectrogram& ref) {
  detail::ByteWriter w;
  w.bytes("QREF");
  w.u8(1);
  w.f64(ref.z);
  w.u32(ref.training_count);
  w.u32(static_cast<std::uint32_t>(ref.values.rows));
  w.u32(static_cast<std::uint32_t>(ref.values.cols));
  for (double v : ref.values.data) w.f64(v);
  const nlohmann::json meta = {{"fingerprint", ref.fingerprint},
                               {"quantile_rule", quantile_rule_name(ref.rule)}};
  w.length_prefixed(meta.dump());
  return w.buffer();
}

ReferenceSpectrogram decode_reference(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, "QREF1");
  const std::string magic = r.bytes(4);
  if (magic != "QREF") throw Error(ErrorKind::FormatError, "QREF1: bad magic '" + magic + "'");
  const auto version = r.u8();
  if (version != 1) {
    throw Error(ErrorKind::FormatError, "QREF1: unsupported version " + std::to_string(version));
  }
  ReferenceSpectrogram ref;
  ref.z = r.f64();
  ref.training_count = r.u32();
  const std::size_t rows = r.u32();
  const std::size_t cols = r.u32();
  if (rows * cols > r.remaining() / 8) {
    throw Error(ErrorKind::FormatError, "QREF1: truncated matrix payload");
  }
  ref.values = Matrix(rows, cols);
  for (double& v : ref.values.data) v = r.f64();
  const auto meta = detail::parse_metadata(r.length_prefixed(), "QREF1");
  r.expect_end();
  if (!(ref.z >= 0.0 && ref.z <= 1.0)) throw Error(ErrorKind::FormatError, "QREF1: z outside [0, 1]");
  if (ref.training_count == 0) throw Error(ErrorKind::FormatError, "QREF1: zero training count");
  detail::check_finite(ref.values, "QREF1");
  ref.fingerprint = meta.value("fingerprint", std::string{});
  try {
    ref.rule = parse_quantile_rule(meta.value("quantile_rule", std::string{"linear"}));
  } catch (const Error& e) {
    throw Error(ErrorKind::FormatError, std::string("QREF1: ") + e.what());
  }
  return ref;
}

void save_reference(const ReferenceSpectrogram& ref, const std::filesystem::path& path) {
  detail::write_file(path, encode_reference(ref));
}

ReferenceSpectrogram load_reference(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  try {
    return decode_reference(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace qpool
