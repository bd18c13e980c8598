#include "qpool/pipeline.hpp"

#include "binary_io.hpp"
#include "json.hpp"
#include "qpool/audio_io.hpp"
#include "qpool/error.hpp"

namespace qpool {

void RunConfig::validate() const {
  stft.validate();
  db.validate();
  grid.validate();
  if (seeds.empty()) throw Error(ErrorKind::InvalidConfig, "seed list is empty");
  if (jobs == 0) throw Error(ErrorKind::InvalidConfig, "jobs must be at least 1");
}

RunConfig run_config_from_json(const std::string& text, RunConfig cfg) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::InvalidConfig, "config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "n_fft") {
        cfg.stft.n_fft = value.get<std::size_t>();
      } else if (key == "hop_length") {
        cfg.stft.hop_length = value.get<std::size_t>();
      } else if (key == "center") {
        cfg.stft.center = value.get<bool>();
      } else if (key == "window") {
        if (value.get<std::string>() != "hann") {
          throw Error(ErrorKind::InvalidConfig, "only the hann window is supported");
        }
      } else if (key == "pad_mode") {
        if (value.get<std::string>() != "constant") {
          throw Error(ErrorKind::InvalidConfig, "only constant padding is supported");
        }
      } else if (key == "ref_value") {
        cfg.db.ref_value = value.get<double>();
      } else if (key == "amin") {
        cfg.db.amin = value.get<double>();
      } else if (key == "top_db") {
        cfg.db.top_db = value.is_null() ? std::nullopt : std::optional(value.get<double>());
      } else if (key == "channel") {
        cfg.channel = value.get<std::size_t>();
      } else if (key == "sample_rate") {
        cfg.sample_rate = value.get<std::uint32_t>();
      } else if (key == "quantile_rule") {
        cfg.quantile_rule = parse_quantile_rule(value.get<std::string>());
      } else if (key == "z_grid") {
        cfg.grid.z_grid = value.get<std::vector<double>>();
      } else if (key == "metrics") {
        cfg.grid.metrics.clear();
        for (const auto& m : value) cfg.grid.metrics.push_back(parse_metric(m.get<std::string>()));
      } else if (key == "seeds") {
        cfg.seeds = value.get<std::vector<std::uint64_t>>();
      } else if (key == "jobs") {
        cfg.jobs = value.get<std::size_t>();
      } else {
        throw Error(ErrorKind::InvalidConfig, "unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("config: ") + e.what());
  }
  return cfg;
}

std::string run_config_to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["n_fft"] = cfg.stft.n_fft;
  j["hop_length"] = cfg.stft.effective_hop();
  j["window"] = "hann";
  j["center"] = cfg.stft.center;
  j["pad_mode"] = "constant";
  j["ref_value"] = cfg.db.ref_value;
  j["amin"] = cfg.db.amin;
  j["top_db"] = cfg.db.top_db ? nlohmann::ordered_json(*cfg.db.top_db) : nlohmann::ordered_json();
  j["fingerprint"] = config_fingerprint(cfg.stft, cfg.db);
  j["channel"] = cfg.channel;
  j["sample_rate"] = cfg.sample_rate;
  j["quantile_rule"] = quantile_rule_name(cfg.quantile_rule);
  j["z_grid"] = cfg.grid.z_grid;
  auto metrics = nlohmann::ordered_json::array();
  for (Metric m : cfg.grid.metrics) metrics.push_back(metric_name(m));
  j["metrics"] = metrics;
  j["seeds"] = cfg.seeds;
  j["jobs"] = cfg.jobs;
  return j.dump(2) + "\n";
}

Spectrogram load_sample(const std::filesystem::path& path, const RunConfig& cfg) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = detail::read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorKind::UnreadablePath, e.what());
  }
  auto starts_with = [&](std::string_view magic) {
    return bytes.size() >= magic.size() &&
           std::equal(magic.begin(), magic.end(), bytes.begin());
  };
  try {
    if (starts_with("SPEC")) return decode_spectrogram(bytes);
    if (starts_with("RIFF")) {
      const AudioClip clip = decode_wav(bytes);
      if (cfg.sample_rate != 0 && clip.sample_rate != cfg.sample_rate) {
        throw Error(ErrorKind::SampleRateMismatch,
                    "sample rate " + std::to_string(clip.sample_rate) + " Hz, expected " +
                        std::to_string(cfg.sample_rate) + " Hz");
      }
      const auto mono = select_channel(clip, cfg.channel);
      return compute_spectrogram(mono, cfg.stft, cfg.db, path.string());
    }
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
  throw Error(ErrorKind::FormatError, path.string() + ": neither a WAV nor a SPEC1 file");
}

std::shared_ptr<const Spectrogram> FileSource::load(const std::string& id) const {
  return std::make_shared<const Spectrogram>(load_sample(id, cfg_));
}

}  // namespace qpool
