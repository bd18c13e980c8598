#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "qpool/evaluation.hpp"
#include "qpool/reference.hpp"
#include "qpool/spectrogram.hpp"
#include "qpool/tuning.hpp"

namespace qpool {

/// Everything a CLI run depends on besides its input files.
struct RunConfig {
  StftConfig stft;
  DbConfig db;
  std::size_t channel = 0;
  std::uint32_t sample_rate = 16000;  // 0 accepts any rate
  QuantileRule quantile_rule = QuantileRule::Linear;
  GridConfig grid;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::size_t jobs = 1;

  void validate() const;
};

/// Flat JSON object. Keys present in `text` override `base`; unknown keys are
/// rejected. `top_db: null` disables the dynamic-range clamp.
RunConfig run_config_from_json(const std::string& text, RunConfig base = {});
std::string run_config_to_json(const RunConfig& cfg);

/// Loads a SPEC1 file as is, or decodes a WAV file and computes its
/// spectrogram with the configured channel and preprocessing. The format is
/// detected from the file's magic bytes.
Spectrogram load_sample(const std::filesystem::path& path, const RunConfig& cfg);

/// SampleSource over file paths; ids are paths.
class FileSource final : public SampleSource {
 public:
  explicit FileSource(RunConfig cfg) : cfg_(std::move(cfg)) {}
  std::shared_ptr<const Spectrogram> load(const std::string& id) const override;

 private:
  RunConfig cfg_;
};

}  // namespace qpool
