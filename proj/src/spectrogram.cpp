#include "qpool/spectrogram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "binary_io.hpp"
#include "fft.hpp"
#include "qpool/error.hpp"
#include "spec_container.hpp"

namespace qpool {

void StftConfig::validate() const {
  if (n_fft == 0 || n_fft % 2 != 0) {
    throw Error(ErrorKind::InvalidConfig, "n_fft must be positive and even, got " +
                                              std::to_string(n_fft));
  }
  const std::size_t hop = effective_hop();
  if (hop == 0 || hop > n_fft) {
    throw Error(ErrorKind::InvalidConfig, "hop_length must lie in (0, n_fft], got " +
                                              std::to_string(hop));
  }
}

void DbConfig::validate() const {
  if (!(ref_value > 0.0) || !std::isfinite(ref_value)) {
    throw Error(ErrorKind::InvalidConfig, "ref_value must be positive");
  }
  if (!(amin > 0.0) || !std::isfinite(amin)) {
    throw Error(ErrorKind::InvalidConfig, "amin must be positive");
  }
  if (top_db && !(*top_db >= 0.0)) {
    throw Error(ErrorKind::InvalidConfig, "top_db must be non-negative");
  }
}

std::string config_fingerprint(const StftConfig& stft, const DbConfig& db) {
  char canonical[256];
  std::snprintf(canonical, sizeof canonical,
                "stft:n_fft=%zu;hop=%zu;window=hann;center=%d;pad=constant|"
                "db:ref=%.17g;amin=%.17g;top_db=%s%.17g",
                stft.n_fft, stft.effective_hop(), stft.center ? 1 : 0, db.ref_value, db.amin,
                db.top_db ? "" : "none", db.top_db.value_or(0.0));
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char* p = canonical; *p != '\0'; ++p) {
    h ^= static_cast<unsigned char>(*p);
    h *= 0x100000001b3ULL;
  }
  char out[32];
  std::snprintf(out, sizeof out, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return out;
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                                 static_cast<double>(n)));
  }
  return w;
}

std::size_t frame_count(std::size_t length, const StftConfig& cfg) {
  const std::size_t hop = cfg.effective_hop();
  if (cfg.center) return 1 + length / hop;
  if (length < cfg.n_fft) return 0;
  return 1 + (length - cfg.n_fft) / hop;
}

Matrix stft_magnitude(std::span<const double> signal, const StftConfig& cfg) {
  cfg.validate();
  if (signal.empty()) throw Error(ErrorKind::SignalTooShort, "empty signal");
  const std::size_t n = cfg.n_fft;
  const std::size_t hop = cfg.effective_hop();
  const std::size_t frames = frame_count(signal.size(), cfg);
  if (frames == 0) {
    throw Error(ErrorKind::SignalTooShort, "signal of " + std::to_string(signal.size()) +
                                               " samples is shorter than n_fft without centering");
  }

  // Constant (zero) padding of n_fft/2 on both ends when centered.
  const std::size_t pad = cfg.center ? n / 2 : 0;
  std::vector<double> padded(signal.size() + 2 * pad, 0.0);
  std::copy(signal.begin(), signal.end(), padded.begin() + static_cast<std::ptrdiff_t>(pad));

  const std::vector<double> window = hann_window(n);
  const std::size_t bins = n / 2 + 1;
  Matrix out(bins, frames);
  detail::RealDftMagnitude dft(n);
  std::vector<double> frame(n);
  std::vector<double> mag(bins);
  for (std::size_t t = 0; t < frames; ++t) {
    const double* src = padded.data() + t * hop;
    for (std::size_t i = 0; i < n; ++i) frame[i] = src[i] * window[i];
    dft(frame, mag);
    for (std::size_t f = 0; f < bins; ++f) out(f, t) = mag[f];
  }
  return out;
}

Matrix amplitude_to_db(const Matrix& magnitudes, const DbConfig& cfg) {
  cfg.validate();
  Matrix out(magnitudes.rows, magnitudes.cols);
  const double ref_db = 20.0 * std::log10(std::max(cfg.amin, cfg.ref_value));
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < magnitudes.size(); ++i) {
    const double a = magnitudes.data[i];
    if (!(a >= 0.0)) throw Error(ErrorKind::DomainError, "negative or NaN magnitude");
    out.data[i] = 20.0 * std::log10(std::max(cfg.amin, a)) - ref_db;
    peak = std::max(peak, out.data[i]);
  }
  if (cfg.top_db && !out.data.empty()) {
    const double floor = peak - *cfg.top_db;
    for (double& d : out.data) d = std::max(d, floor);
  }
  return out;
}

Spectrogram compute_spectrogram(std::span<const double> signal, const StftConfig& stft,
                                const DbConfig& db, std::string source_id) {
  db.validate();
  Spectrogram spec;
  spec.values = amplitude_to_db(stft_magnitude(signal, stft), db);
  spec.source_id = std::move(source_id);
  spec.fingerprint = config_fingerprint(stft, db);
  return spec;
}

namespace detail {

std::vector<std::uint8_t> encode_spec1(const Matrix& values, const nlohmann::json& metadata) {
  ByteWriter w;
  w.bytes("SPEC");
  w.u8(1);
  w.u32(static_cast<std::uint32_t>(values.rows));
  w.u32(static_cast<std::uint32_t>(values.cols));
  for (double v : values.data) w.f64(v);
  w.length_prefixed(metadata.dump());
  return w.buffer();
}

nlohmann::json parse_metadata(const std::string& text, const char* container) {
  auto meta = nlohmann::json::parse(text, nullptr, false);
  if (meta.is_discarded() || !meta.is_object()) {
    throw Error(ErrorKind::FormatError, std::string(container) + ": metadata is not a JSON object");
  }
  return meta;
}

void check_finite(const Matrix& m, const char* container) {
  for (double v : m.data) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::FormatError, std::string(container) + ": non-finite value");
    }
  }
}

Spec1Contents decode_spec1(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "SPEC1");
  const std::string magic = r.bytes(4);
  if (magic != "SPEC") {
    throw Error(ErrorKind::FormatError, "SPEC1: bad magic '" + magic + "'");
  }
  const auto version = r.u8();
  if (version != 1) {
    throw Error(ErrorKind::FormatError, "SPEC1: unsupported version " + std::to_string(version));
  }
  const std::size_t rows = r.u32();
  const std::size_t cols = r.u32();
  if (rows * cols > r.remaining() / 8) {
    throw Error(ErrorKind::FormatError, "SPEC1: truncated matrix payload");
  }
  Spec1Contents out{Matrix(rows, cols), {}};
  for (double& v : out.values.data) v = r.f64();
  out.metadata = parse_metadata(r.length_prefixed(), "SPEC1");
  r.expect_end();
  check_finite(out.values, "SPEC1");
  return out;
}

}  // namespace detail

std::vector<std::uint8_t> encode_spectrogram(const Spectrogram& spec) {
  return detail::encode_spec1(spec.values,
                              {{"source_id", spec.source_id}, {"fingerprint", spec.fingerprint}});
}

Spectrogram decode_spectrogram(std::span<const std::uint8_t> bytes) {
  auto contents = detail::decode_spec1(bytes);
  Spectrogram spec;
  spec.values = std::move(contents.values);
  spec.source_id = contents.metadata.value("source_id", std::string{});
  spec.fingerprint = contents.metadata.value("fingerprint", std::string{});
  return spec;
}

void save_spectrogram(const Spectrogram& spec, const std::filesystem::path& path) {
  detail::write_file(path, encode_spectrogram(spec));
}

Spectrogram load_spectrogram(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  try {
    return decode_spectrogram(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace qpool
