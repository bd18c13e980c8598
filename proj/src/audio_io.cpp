#include "qpool/audio_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include "binary_io.hpp"
#include "qpool/error.hpp"

namespace qpool {
namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

struct FormatChunk {
  std::uint16_t format_tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits_per_sample = 0;
};

std::uint16_t le16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t le32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) |
         (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, std::string_view tag) {
  return std::equal(tag.begin(), tag.end(), b.begin() + static_cast<std::ptrdiff_t>(at));
}

[[noreturn]] void malformed(const std::string& why) {
  throw Error(ErrorKind::MalformedWav, why);
}

FormatChunk parse_format(std::span<const std::uint8_t> chunk) {
  if (chunk.size() < 16) malformed("fmt chunk shorter than 16 bytes");
  FormatChunk fmt;
  fmt.format_tag = le16(chunk, 0);
  fmt.channels = le16(chunk, 2);
  fmt.sample_rate = le32(chunk, 4);
  fmt.block_align = le16(chunk, 12);
  fmt.bits_per_sample = le16(chunk, 14);
  if (fmt.format_tag == kFormatExtensible) {
    if (chunk.size() < 40) malformed("WAVE_FORMAT_EXTENSIBLE fmt chunk shorter than 40 bytes");
    // The first two bytes of the sub-format GUID carry the actual format tag.
    fmt.format_tag = le16(chunk, 24);
  }
  if (fmt.format_tag != kFormatPcm && fmt.format_tag != kFormatFloat) {
    throw Error(ErrorKind::UnsupportedEncoding,
                "unsupported WAV format tag " + std::to_string(fmt.format_tag));
  }
  const bool pcm_ok = fmt.format_tag == kFormatPcm &&
                      (fmt.bits_per_sample == 8 || fmt.bits_per_sample == 16 ||
                       fmt.bits_per_sample == 24 || fmt.bits_per_sample == 32);
  const bool float_ok = fmt.format_tag == kFormatFloat && fmt.bits_per_sample == 32;
  if (!pcm_ok && !float_ok) {
    throw Error(ErrorKind::UnsupportedEncoding,
                "unsupported sample width " + std::to_string(fmt.bits_per_sample) + " bits");
  }
  if (fmt.channels == 0) malformed("zero channels");
  if (fmt.sample_rate == 0) malformed("zero sample rate");
  if (fmt.block_align != fmt.channels * (fmt.bits_per_sample / 8)) {
    malformed("block_align inconsistent with channels and sample width");
  }
  return fmt;
}

double decode_sample(std::span<const std::uint8_t> b, std::size_t at, const FormatChunk& fmt) {
  switch (fmt.bits_per_sample) {
    case 8:
      return (static_cast<int>(b[at]) - 128) / 128.0;
    case 16:
      return static_cast<std::int16_t>(le16(b, at)) / 32768.0;
    case 24: {
      std::int32_t v = b[at] | (b[at + 1] << 8) | (b[at + 2] << 16);
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    default: {
      const std::uint32_t raw = le32(b, at);
      if (fmt.format_tag == kFormatFloat) {
        const double v = std::bit_cast<float>(raw);
        if (!std::isfinite(v)) malformed("non-finite float sample");
        return std::clamp(v, -1.0, 1.0);
      }
      return static_cast<std::int32_t>(raw) / 2147483648.0;
    }
  }
}

std::int64_t quantize(double x, int bits) {
  const double scale = std::ldexp(1.0, bits - 1);
  const double lo = -scale;
  const double hi = scale - 1.0;
  return static_cast<std::int64_t>(std::clamp(std::nearbyint(x * scale), lo, hi));
}

}  // namespace

AudioClip decode_wav(std::span<const std::uint8_t> b) {
  if (b.size() < 12 || !tag_is(b, 0, "RIFF") || !tag_is(b, 8, "WAVE")) {
    malformed("missing RIFF/WAVE header");
  }
  std::optional<FormatChunk> fmt;
  std::span<const std::uint8_t> data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= b.size()) {
    const std::uint32_t size = le32(b, pos + 4);
    const std::size_t body = pos + 8;
    if (size > b.size() - body) {
      // Some writers leave a bogus data size; accept a truncated final data chunk.
      if (tag_is(b, pos, "data") && fmt) {
        data = b.subspan(body);
        have_data = true;
        break;
      }
      malformed("chunk '" + std::string(b.begin() + pos, b.begin() + pos + 4) +
                "' overruns the file");
    }
    if (tag_is(b, pos, "fmt ")) {
      fmt = parse_format(b.subspan(body, size));
    } else if (tag_is(b, pos, "data")) {
      if (!fmt) malformed("data chunk precedes fmt chunk");
      data = b.subspan(body, size);
      have_data = true;
    }
    pos = body + size + (size & 1u);
  }
  if (!fmt) malformed("no fmt chunk");
  if (!have_data) malformed("no data chunk");

  const std::size_t frames = data.size() / fmt->block_align;
  const std::size_t width = fmt->bits_per_sample / 8;
  AudioClip clip;
  clip.sample_rate = fmt->sample_rate;
  clip.channels.assign(fmt->channels, std::vector<double>(frames));
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t c = 0; c < fmt->channels; ++c) {
      clip.channels[c][f] = decode_sample(data, f * fmt->block_align + c * width, *fmt);
    }
  }
  return clip;
}

AudioClip read_wav(const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = detail::read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorKind::UnreadablePath, e.what());
  }
  try {
    return decode_wav(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_wav(const AudioClip& clip, SampleEncoding encoding) {
  int bits = 16;
  std::uint16_t tag = kFormatPcm;
  switch (encoding) {
    case SampleEncoding::Pcm8: bits = 8; break;
    case SampleEncoding::Pcm16: bits = 16; break;
    case SampleEncoding::Pcm24: bits = 24; break;
    case SampleEncoding::Pcm32: bits = 32; break;
    case SampleEncoding::Float32: bits = 32; tag = kFormatFloat; break;
  }
  const auto channels = static_cast<std::uint32_t>(clip.channel_count());
  const auto frames = static_cast<std::uint32_t>(clip.samples_per_channel());
  const std::uint32_t block = channels * static_cast<std::uint32_t>(bits / 8);
  const std::uint32_t data_size = block * frames;

  detail::ByteWriter w;
  w.bytes("RIFF");
  w.u32(4 + 8 + 16 + 8 + data_size + (data_size & 1u));
  w.bytes("WAVE");
  w.bytes("fmt ");
  w.u32(16);
  w.u16(tag);
  w.u16(static_cast<std::uint16_t>(channels));
  w.u32(clip.sample_rate);
  w.u32(clip.sample_rate * block);
  w.u16(static_cast<std::uint16_t>(block));
  w.u16(static_cast<std::uint16_t>(bits));
  w.bytes("data");
  w.u32(data_size);
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t c = 0; c < channels; ++c) {
      const double x = clip.channels[c][f];
      if (encoding == SampleEncoding::Float32) {
        w.u32(std::bit_cast<std::uint32_t>(static_cast<float>(x)));
        continue;
      }
      const std::int64_t q = quantize(x, bits);
      if (bits == 8) {
        w.u8(static_cast<std::uint8_t>(q + 128));
      } else {
        for (int i = 0; i < bits / 8; ++i) w.u8(static_cast<std::uint8_t>(q >> (8 * i)));
      }
    }
  }
  if (data_size & 1u) w.u8(0);
  return w.buffer();
}

std::vector<double> select_channel(const AudioClip& clip, std::size_t index) {
  if (index >= clip.channel_count()) {
    throw Error(ErrorKind::ChannelOutOfRange,
                "channel " + std::to_string(index) + " requested, clip has " +
                    std::to_string(clip.channel_count()));
  }
  return clip.channels[index];
}

std::string_view label_name(Label label) noexcept {
  return label == Label::Normal ? "normal" : "anormal";
}

Label parse_label(std::string_view text, bool allow_abnormal) {
  if (text == "normal") return Label::Normal;
  if (text == "anormal" || (allow_abnormal && text == "abnormal")) return Label::Anormal;
  throw Error(ErrorKind::FormatError, "unknown label '" + std::string(text) + "'");
}

std::size_t DatasetManifest::count(Label label) const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(), [&](const ManifestEntry& e) { return e.label == label; }));
}

namespace {

namespace fs = std::filesystem;

void sort_and_check(DatasetManifest& manifest, const fs::path& root) {
  if (manifest.entries.empty()) {
    throw Error(ErrorKind::EmptyDataset, "no samples found under " + root.string());
  }
  std::sort(manifest.entries.begin(), manifest.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
  for (std::size_t i = 1; i < manifest.entries.size(); ++i) {
    if (manifest.entries[i].path == manifest.entries[i - 1].path) {
      throw Error(ErrorKind::FormatError, "duplicate manifest path " + manifest.entries[i].path);
    }
  }
}

std::string snr_from(const fs::path& path) {
  static const std::regex snr_re(R"(^(-?\d+)_dB)");
  std::string snr;
  for (const auto& part : path) {
    std::smatch m;
    const std::string s = part.string();
    if (std::regex_search(s, m, snr_re)) snr = m[1].str() + "dB";
  }
  return snr;
}

DatasetManifest scan_mimii(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error(ErrorKind::UnreadablePath, "not a directory: " + root.string());
  }
  DatasetManifest manifest;
  for (auto it = fs::recursive_directory_iterator(root, ec);
       !ec && it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (!it->is_regular_file()) continue;
    const fs::path& p = it->path();
    const std::string ext = p.extension().string();
    if (ext != ".wav" && ext != ".spec") continue;
    const fs::path label_dir = p.parent_path();
    const fs::path id_dir = label_dir.parent_path();
    const std::string label = label_dir.filename().string();
    const std::string id = id_dir.filename().string();
    if ((label != "normal" && label != "abnormal") || !id.starts_with("id_")) continue;
    manifest.entries.push_back({p.lexically_normal().string(), parse_label(label, true),
                                id_dir.parent_path().filename().string(), id.substr(3),
                                snr_from(p)});
  }
  if (ec) throw Error(ErrorKind::UnreadablePath, root.string() + ": " + ec.message());
  sort_and_check(manifest, root);
  return manifest;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

DatasetManifest read_csv_manifest(const fs::path& csv) {
  std::ifstream in(csv);
  if (!in) throw Error(ErrorKind::UnreadablePath, "cannot open manifest " + csv.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::EmptyDataset, "empty manifest " + csv.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "path,label,machine_type,machine_id,snr") {
    throw Error(ErrorKind::FormatError, csv.string() + ": unexpected header '" + line + "'");
  }
  const fs::path base = csv.parent_path();
  DatasetManifest manifest;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 5) {
      throw Error(ErrorKind::FormatError,
                  csv.string() + ":" + std::to_string(line_no) + ": expected 5 fields");
    }
    fs::path p(f[0]);
    if (p.is_relative()) p = base / p;
    p = p.lexically_normal();
    std::error_code ec;
    if (!fs::is_regular_file(p, ec)) {
      throw Error(ErrorKind::UnreadablePath, "manifest entry not found: " + p.string());
    }
    manifest.entries.push_back({p.string(), parse_label(f[1]), f[2], f[3], f[4]});
  }
  sort_and_check(manifest, csv);
  return manifest;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

DatasetManifest scan_dataset(const std::filesystem::path& root, LayoutRule rule) {
  return rule == LayoutRule::Mimii ? scan_mimii(root) : read_csv_manifest(root);
}

std::string manifest_to_csv(const DatasetManifest& manifest) {
  std::ostringstream out;
  out << "path,label,machine_type,machine_id,snr\n";
  for (const auto& e : manifest.entries) {
    out << csv_field(e.path) << ',' << label_name(e.label) << ',' << csv_field(e.machine_type)
        << ',' << csv_field(e.machine_id) << ',' << csv_field(e.snr) << '\n';
  }
  return out.str();
}

void write_manifest_csv(const DatasetManifest& manifest, const std::filesystem::path& path) {
  const std::string text = manifest_to_csv(manifest);
  detail::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace qpool
