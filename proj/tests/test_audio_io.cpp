#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "qpool/audio_io.hpp"
#include "qpool/error.hpp"
#include "qpool/random.hpp"
#include "test_util.hpp"

using namespace qpool;

namespace {

std::vector<std::uint8_t> one_sample_wav(std::uint16_t raw) {
  AudioClip clip;
  clip.sample_rate = 16000;
  clip.channels = {{raw / 32768.0}};
  return encode_wav(clip, SampleEncoding::Pcm16);
}

}  // namespace

TEST_CASE("16-bit full-scale sample normalizes by 32768") {
  const auto clip = decode_wav(one_sample_wav(0x7FFF));
  REQUIRE(clip.channel_count() == 1);
  REQUIRE(clip.samples_per_channel() == 1);
  CHECK(clip.channels[0][0] == 32767.0 / 32768.0);
  CHECK(clip.sample_rate == 16000);
}

TEST_CASE("8-channel 16 kHz 10 s clip has 160000 samples per channel") {
  AudioClip clip;
  clip.sample_rate = 16000;
  clip.channels.assign(8, std::vector<double>(160000, 0.0));
  for (std::size_t c = 0; c < 8; ++c) clip.channels[c][c] = 0.25;
  const auto decoded = decode_wav(encode_wav(clip, SampleEncoding::Pcm16));
  CHECK(decoded.channel_count() == 8);
  CHECK(decoded.samples_per_channel() == 160000);
  CHECK(decoded.channels[5][5] == 0.25);
  CHECK(decoded.channels[5][4] == 0.0);
}

TEST_CASE("sine round trip stays within one LSB for every PCM depth") {
  AudioClip clip;
  clip.sample_rate = 16000;
  clip.channels.resize(1);
  for (int i = 0; i < 1600; ++i) {
    clip.channels[0].push_back(0.8 * std::sin(2 * std::numbers::pi * 1000.0 * i / 16000.0));
  }
  for (auto [enc, bits] : {std::pair{SampleEncoding::Pcm8, 8}, {SampleEncoding::Pcm16, 16},
                           {SampleEncoding::Pcm24, 24}, {SampleEncoding::Pcm32, 32}}) {
    CAPTURE(bits);
    const auto back = decode_wav(encode_wav(clip, enc));
    const double lsb = std::ldexp(1.0, -(bits - 1));
    for (std::size_t i = 0; i < clip.channels[0].size(); ++i) {
      REQUIRE(std::abs(back.channels[0][i] - clip.channels[0][i]) <= lsb);
    }
  }
  const auto f = decode_wav(encode_wav(clip, SampleEncoding::Float32));
  CHECK(std::abs(f.channels[0][17] - clip.channels[0][17]) < 1e-7);
}

TEST_CASE("property: decode(encode(x)) within 1 LSB for random multichannel clips") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    AudioClip clip;
    clip.sample_rate = 8000 + static_cast<std::uint32_t>(rng.uniform_below(40000));
    const auto channels = 1 + rng.uniform_below(8);
    const auto frames = 1 + rng.uniform_below(300);
    clip.channels.assign(channels, std::vector<double>(frames));
    for (auto& ch : clip.channels) {
      for (double& x : ch) x = 2.0 * rng.uniform_open_closed() - 1.0;
    }
    const auto back = decode_wav(encode_wav(clip, SampleEncoding::Pcm24));
    REQUIRE(back.sample_rate == clip.sample_rate);
    REQUIRE(back.channel_count() == channels);
    for (std::size_t c = 0; c < channels; ++c) {
      for (std::size_t i = 0; i < frames; ++i) {
        REQUIRE(std::abs(back.channels[c][i] - clip.channels[c][i]) <= 0x1.0p-23);
        REQUIRE(back.channels[c][i] >= -1.0);
        REQUIRE(back.channels[c][i] <= 1.0);
      }
    }
  }
}

TEST_CASE("malformed and unsupported WAV inputs") {
  SUBCASE("bad magic") {
    std::vector<std::uint8_t> junk(44, 0);
    CHECK_THROWS_KIND(decode_wav(junk), ErrorKind::MalformedWav);
  }
  SUBCASE("truncated header") {
    auto bytes = one_sample_wav(1);
    bytes.resize(20);
    CHECK_THROWS_KIND(decode_wav(bytes), ErrorKind::MalformedWav);
  }
  SUBCASE("compressed format tag") {
    auto bytes = one_sample_wav(1);
    bytes[20] = 0x02;  // MS ADPCM
    CHECK_THROWS_KIND(decode_wav(bytes), ErrorKind::UnsupportedEncoding);
  }
  SUBCASE("no data chunk") {
    auto bytes = one_sample_wav(1);
    bytes.resize(36);
    CHECK_THROWS_KIND(decode_wav(bytes), ErrorKind::MalformedWav);
  }
}

TEST_CASE("select_channel") {
  AudioClip mono;
  mono.sample_rate = 16000;
  mono.channels = {{0.1, 0.2}};
  CHECK(select_channel(mono, 0) == mono.channels[0]);

  AudioClip eight;
  eight.sample_rate = 16000;
  for (int c = 0; c < 8; ++c) eight.channels.push_back({c * 0.1, -c * 0.1});
  CHECK(select_channel(eight, 7) == eight.channels[7]);
  CHECK_THROWS_KIND(select_channel(eight, 8), ErrorKind::ChannelOutOfRange);
}

TEST_CASE("scan_dataset over a MIMII-style tree") {
  TempDir tmp;
  const auto base = tmp.path() / "0_dB_fan" / "fan" / "id_00";
  const auto wav = one_sample_wav(100);
  write_bytes(base / "normal" / "00000001.wav", wav);
  write_bytes(base / "normal" / "00000000.wav", wav);
  write_bytes(base / "abnormal" / "00000000.wav", wav);
  write_bytes(base / "notes.txt", wav);

  const auto m = scan_dataset(tmp.path(), LayoutRule::Mimii);
  REQUIRE(m.entries.size() == 3);
  CHECK(m.count(Label::Normal) == 2);
  CHECK(m.count(Label::Anormal) == 1);
  CHECK(m.entries[0].label == Label::Anormal);  // "abnormal" sorts first
  CHECK(m.entries[0].machine_type == "fan");
  CHECK(m.entries[0].machine_id == "00");
  CHECK(m.entries[0].snr == "0dB");
  CHECK(std::is_sorted(m.entries.begin(), m.entries.end(),
                       [](const auto& a, const auto& b) { return a.path < b.path; }));
  CHECK(scan_dataset(tmp.path(), LayoutRule::Mimii) == m);
}

TEST_CASE("scan_dataset over a CSV manifest") {
  TempDir tmp;
  write_bytes(tmp.path() / "a.wav", one_sample_wav(1));
  write_bytes(tmp.path() / "b.wav", one_sample_wav(2));
  write_text(tmp.path() / "m.csv",
             "path,label,machine_type,machine_id,snr\nb.wav,anormal,pump,02,6dB\na.wav,normal,pump,02,6dB\n");
  const auto m = scan_dataset(tmp.path() / "m.csv", LayoutRule::Csv);
  REQUIRE(m.entries.size() == 2);
  CHECK(m.entries[0].path == (tmp.path() / "a.wav").string());
  CHECK(m.entries[1].label == Label::Anormal);
  CHECK(m.entries[1].snr == "6dB");

  // Re-reading the written form gives the same manifest.
  write_manifest_csv(m, tmp.path() / "m2.csv");
  CHECK(scan_dataset(tmp.path() / "m2.csv", LayoutRule::Csv) == m);

  SUBCASE("missing file names the offender") {
    write_text(tmp.path() / "bad.csv",
               "path,label,machine_type,machine_id,snr\nmissing.wav,normal,pump,02,6dB\n");
    try {
      scan_dataset(tmp.path() / "bad.csv", LayoutRule::Csv);
      FAIL("expected UnreadablePath");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::UnreadablePath);
      CHECK(std::string(e.what()).find("missing.wav") != std::string::npos);
    }
  }
  SUBCASE("unknown label") {
    write_text(tmp.path() / "bad.csv",
               "path,label,machine_type,machine_id,snr\na.wav,broken,pump,02,6dB\n");
    CHECK_THROWS_KIND(scan_dataset(tmp.path() / "bad.csv", LayoutRule::Csv), ErrorKind::FormatError);
  }
  SUBCASE("empty dataset") {
    write_text(tmp.path() / "empty.csv", "path,label,machine_type,machine_id,snr\n");
    CHECK_THROWS_KIND(scan_dataset(tmp.path() / "empty.csv", LayoutRule::Csv), ErrorKind::EmptyDataset);
  }
}
