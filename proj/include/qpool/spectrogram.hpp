#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qpool/matrix.hpp"

namespace qpool {

enum class WindowKind { Hann };
enum class PadMode { Constant };

struct StftConfig {
  std::size_t n_fft = 2048;
  std::size_t hop_length = 0;  // 0 selects n_fft / 4
  WindowKind window = WindowKind::Hann;
  bool center = true;
  PadMode pad_mode = PadMode::Constant;

  std::size_t effective_hop() const noexcept {
    return hop_length != 0 ? hop_length : (n_fft / 4 == 0 ? 1 : n_fft / 4);
  }
  /// Throws InvalidConfig unless n_fft is positive and even and 0 < hop <= n_fft.
  void validate() const;
};

struct DbConfig {
  double ref_value = 1.0;
  double amin = 1e-5;
  std::optional<double> top_db = 80.0;

  void validate() const;
};

/// dB-scale magnitude spectrogram, rows = n_fft/2 + 1 frequency bins.
struct Spectrogram {
  Matrix values;
  std::string source_id;
  std::string fingerprint;  // identifies the preprocessing that produced `values`
};

/// Stable hash of the preprocessing parameters, "fnv1a64:<16 hex digits>".
std::string config_fingerprint(const StftConfig& stft, const DbConfig& db);

/// Periodic Hann window, w[k] = 0.5 (1 - cos(2πk/n)).
std::vector<double> hann_window(std::size_t n);

/// Number of frames produced for a signal of `length` samples.
std::size_t frame_count(std::size_t length, const StftConfig& cfg);

Matrix stft_magnitude(std::span<const double> signal, const StftConfig& cfg);

Matrix amplitude_to_db(const Matrix& magnitudes, const DbConfig& cfg);

Spectrogram compute_spectrogram(std::span<const double> signal, const StftConfig& stft,
                                const DbConfig& db, std::string source_id = {});

// SPEC1 container: "SPEC", u8 version, u32 rows, u32 cols, f64 values
// (row-major), u32-prefixed JSON metadata. All little-endian.
std::vector<std::uint8_t> encode_spectrogram(const Spectrogram& spec);
Spectrogram decode_spectrogram(std::span<const std::uint8_t> bytes);
void save_spectrogram(const Spectrogram& spec, const std::filesystem::path& path);
Spectrogram load_spectrogram(const std::filesystem::path& path);

}  // namespace qpool
