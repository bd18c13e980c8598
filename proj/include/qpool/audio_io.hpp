#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qpool {

/// Decoded PCM audio. Integer PCM is normalized by 2^(bits-1), so every
/// sample lies in [-1, 1).
struct AudioClip {
  std::uint32_t sample_rate = 0;
  std::vector<std::vector<double>> channels;

  std::size_t channel_count() const noexcept { return channels.size(); }
  std::size_t samples_per_channel() const noexcept {
    return channels.empty() ? 0 : channels.front().size();
  }
};

enum class SampleEncoding { Pcm8, Pcm16, Pcm24, Pcm32, Float32 };

AudioClip decode_wav(std::span<const std::uint8_t> file_bytes);
AudioClip read_wav(const std::filesystem::path& path);

/// Inverse of decode_wav, used for fixtures and synthetic corpora.
/// Integer encodings round to nearest and saturate.
std::vector<std::uint8_t> encode_wav(const AudioClip& clip, SampleEncoding encoding);

std::vector<double> select_channel(const AudioClip& clip, std::size_t index);

enum class Label { Normal, Anormal };

std::string_view label_name(Label label) noexcept;
/// Accepts "normal" and "anormal"; `allow_abnormal` also maps "abnormal"
/// (the MIMII directory name) to Anormal.
Label parse_label(std::string_view text, bool allow_abnormal = false);

struct ManifestEntry {
  std::string path;
  Label label = Label::Normal;
  std::string machine_type;
  std::string machine_id;
  std::string snr;

  bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  std::size_t count(Label label) const;
  bool operator==(const DatasetManifest&) const = default;
};

enum class LayoutRule {
  Mimii,  // <root>/.../<machine_type>/id_XX/{normal,abnormal}/*.{wav,spec}
  Csv,    // root is a CSV file: path,label,machine_type,machine_id,snr
};

/// Entries are sorted by path. Relative CSV paths resolve against the CSV's
/// directory and every listed file must exist.
DatasetManifest scan_dataset(const std::filesystem::path& root, LayoutRule rule);

std::string manifest_to_csv(const DatasetManifest& manifest);
void write_manifest_csv(const DatasetManifest& manifest, const std::filesystem::path& path);

}  // namespace qpool
