#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qpool/audio_io.hpp"
#include "qpool/reference.hpp"
#include "qpool/scoring.hpp"
#include "qpool/spectrogram.hpp"

namespace qpool {

struct RocResult {
  double auc = 0.5;
  std::size_t n_pos = 0;  // anormal
  std::size_t n_neg = 0;  // normal
};

/// Area under the ROC curve with anormal as the positive class; tied
/// (positive, negative) pairs count one half. Computed from midranks in
/// integer arithmetic, so it equals the pairwise definition exactly.
RocResult roc_auc(std::span<const double> scores, std::span<const Label> labels);

struct LabeledId {
  std::string id;
  Label label = Label::Normal;
  bool operator==(const LabeledId&) const = default;
};

struct SplitPlan {
  std::uint64_t seed = 0;
  std::vector<std::string> train;
  std::vector<LabeledId> validation;
  std::vector<LabeledId> test;
  bool operator==(const SplitPlan&) const = default;
};

/// Anormal samples go 50/50 to validation (floor) and test (remainder); each
/// receives as many normal samples; the remaining normals form the training
/// set. Deterministic in (manifest, seed). Partitions are sorted by id.
SplitPlan make_splits(const DatasetManifest& manifest, std::uint64_t seed);

std::string split_plan_to_json(const SplitPlan& plan);
SplitPlan split_plan_from_json(const std::string& text);
void save_split_plan(const SplitPlan& plan, const std::filesystem::path& path);
SplitPlan load_split_plan(const std::filesystem::path& path);

/// Resolves sample ids (manifest paths) to spectrograms.
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual std::shared_ptr<const Spectrogram> load(const std::string& id) const = 0;
};

class InMemorySource final : public SampleSource {
 public:
  void add(std::string id, Spectrogram spec);
  std::shared_ptr<const Spectrogram> load(const std::string& id) const override;

 private:
  std::map<std::string, std::shared_ptr<const Spectrogram>> samples_;
};

/// Loads every id; the result keeps the spectrograms alive.
std::vector<std::shared_ptr<const Spectrogram>> load_all(const SampleSource& source,
                                                         std::span<const std::string> ids,
                                                         std::size_t jobs = 1);

/// scores[m][i] is the score of eval_set[i] under metrics[m].
std::vector<std::vector<double>> score_set(const SampleSource& source,
                                           const ReferenceSpectrogram& reference,
                                           std::span<const LabeledId> eval_set,
                                           std::span<const Metric> metrics, std::size_t jobs = 1);

std::vector<Label> labels_of(std::span<const LabeledId> set);

/// Builds the z-reference from `train` and returns the AUC of `metric` on `eval_set`.
RocResult evaluate(const SampleSource& source, std::span<const std::string> train,
                   std::span<const LabeledId> eval_set, double z, Metric metric,
                   QuantileRule rule = QuantileRule::Linear, std::size_t jobs = 1);

}  // namespace qpool
