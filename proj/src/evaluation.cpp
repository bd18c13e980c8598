#include "qpool/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "binary_io.hpp"
#include "json.hpp"
#include "qpool/error.hpp"
#include "qpool/parallel.hpp"
#include "qpool/random.hpp"

namespace qpool {

RocResult roc_auc(std::span<const double> scores, std::span<const Label> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorKind::ShapeMismatch, "scores and labels differ in length");
  }
  RocResult result;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) {
      throw Error(ErrorKind::NonFiniteScore, "score " + std::to_string(i) + " is not finite");
    }
    (labels[i] == Label::Anormal ? result.n_pos : result.n_neg) += 1;
  }
  if (result.n_pos == 0 || result.n_neg == 0) {
    throw Error(ErrorKind::DegenerateLabels, "ROC AUC needs both normal and anormal samples");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  // Twice the positive rank sum; a tie group spanning 1-based ranks [lo, hi]
  // has midrank (lo + hi) / 2, so doubling keeps everything integral.
  std::int64_t twice_rank_sum = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::int64_t positives = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      positives += labels[order[j]] == Label::Anormal ? 1 : 0;
      ++j;
    }
    twice_rank_sum += positives * static_cast<std::int64_t>((i + 1) + j);
    i = j;
  }
  const auto pos = static_cast<std::int64_t>(result.n_pos);
  const auto neg = static_cast<std::int64_t>(result.n_neg);
  const std::int64_t twice_u = twice_rank_sum - pos * (pos + 1);
  result.auc = static_cast<double>(twice_u) / static_cast<double>(2 * pos * neg);
  return result;
}

SplitPlan make_splits(const DatasetManifest& manifest, std::uint64_t seed) {
  std::vector<std::string> normals;
  std::vector<std::string> anormals;
  for (const auto& e : manifest.entries) {
    (e.label == Label::Normal ? normals : anormals).push_back(e.path);
  }
  if (anormals.size() < 2 || normals.size() < anormals.size()) {
    throw Error(ErrorKind::InsufficientSamples,
                "need at least 2 anormal samples and as many normal samples; have " +
                    std::to_string(normals.size()) + " normal, " +
                    std::to_string(anormals.size()) + " anormal");
  }
  std::sort(normals.begin(), normals.end());
  std::sort(anormals.begin(), anormals.end());
  Rng rng(seed);
  rng.shuffle(std::span(anormals));
  rng.shuffle(std::span(normals));

  const std::size_t val_count = anormals.size() / 2;
  const std::size_t test_count = anormals.size() - val_count;
  SplitPlan plan;
  plan.seed = seed;
  for (std::size_t i = 0; i < anormals.size(); ++i) {
    auto& part = i < val_count ? plan.validation : plan.test;
    part.push_back({anormals[i], Label::Anormal});
  }
  for (std::size_t i = 0; i < normals.size(); ++i) {
    if (i < val_count) {
      plan.validation.push_back({normals[i], Label::Normal});
    } else if (i < val_count + test_count) {
      plan.test.push_back({normals[i], Label::Normal});
    } else {
      plan.train.push_back(normals[i]);
    }
  }
  auto by_id = [](const LabeledId& a, const LabeledId& b) { return a.id < b.id; };
  std::sort(plan.train.begin(), plan.train.end());
  std::sort(plan.validation.begin(), plan.validation.end(), by_id);
  std::sort(plan.test.begin(), plan.test.end(), by_id);
  return plan;
}

namespace {

nlohmann::json labeled_to_json(std::span<const LabeledId> set) {
  auto arr = nlohmann::json::array();
  for (const auto& s : set) arr.push_back({{"id", s.id}, {"label", label_name(s.label)}});
  return arr;
}

std::vector<LabeledId> labeled_from_json(const nlohmann::json& arr) {
  std::vector<LabeledId> out;
  for (const auto& item : arr) {
    out.push_back({item.at("id").get<std::string>(),
                   parse_label(item.at("label").get<std::string>())});
  }
  return out;
}

}  // namespace

std::string split_plan_to_json(const SplitPlan& plan) {
  const nlohmann::json j = {{"seed", plan.seed},
                            {"train", plan.train},
                            {"validation", labeled_to_json(plan.validation)},
                            {"test", labeled_to_json(plan.test)}};
  return j.dump(2) + "\n";
}

SplitPlan split_plan_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    SplitPlan plan;
    plan.seed = j.at("seed").get<std::uint64_t>();
    plan.train = j.at("train").get<std::vector<std::string>>();
    plan.validation = labeled_from_json(j.at("validation"));
    plan.test = labeled_from_json(j.at("test"));
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::FormatError, std::string("split plan: ") + e.what());
  }
}

void save_split_plan(const SplitPlan& plan, const std::filesystem::path& path) {
  const std::string text = split_plan_to_json(plan);
  detail::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

SplitPlan load_split_plan(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  return split_plan_from_json(std::string(bytes.begin(), bytes.end()));
}

void InMemorySource::add(std::string id, Spectrogram spec) {
  samples_[std::move(id)] = std::make_shared<const Spectrogram>(std::move(spec));
}

std::shared_ptr<const Spectrogram> InMemorySource::load(const std::string& id) const {
  const auto it = samples_.find(id);
  if (it == samples_.end()) throw Error(ErrorKind::UnreadablePath, "unknown sample id " + id);
  return it->second;
}

std::vector<std::shared_ptr<const Spectrogram>> load_all(const SampleSource& source,
                                                         std::span<const std::string> ids,
                                                         std::size_t jobs) {
  std::vector<std::shared_ptr<const Spectrogram>> out(ids.size());
  parallel_for(ids.size(), jobs, [&](std::size_t i) { out[i] = source.load(ids[i]); });
  return out;
}

std::vector<std::vector<double>> score_set(const SampleSource& source,
                                           const ReferenceSpectrogram& reference,
                                           std::span<const LabeledId> eval_set,
                                           std::span<const Metric> metrics, std::size_t jobs) {
  std::vector<std::vector<double>> scores(metrics.size(), std::vector<double>(eval_set.size()));
  parallel_for(eval_set.size(), jobs, [&](std::size_t i) {
    const auto diff = difference_spectrogram(*source.load(eval_set[i].id), reference);
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      scores[m][i] = score_difference(diff, metrics[m]).value;
    }
  });
  return scores;
}

std::vector<Label> labels_of(std::span<const LabeledId> set) {
  std::vector<Label> out;
  out.reserve(set.size());
  for (const auto& s : set) out.push_back(s.label);
  return out;
}

RocResult evaluate(const SampleSource& source, std::span<const std::string> train,
                   std::span<const LabeledId> eval_set, double z, Metric metric,
                   QuantileRule rule, std::size_t jobs) {
  ReferenceSpectrogram reference;
  {
    const auto loaded = load_all(source, train, jobs);
    std::vector<const Spectrogram*> ptrs;
    for (const auto& s : loaded) ptrs.push_back(s.get());
    const double levels[] = {z};
    reference = std::move(build_references(ptrs, levels, rule, jobs).front());
  }
  const Metric metrics[] = {metric};
  const auto scores = score_set(source, reference, eval_set, metrics, jobs);
  return roc_auc(scores.front(), labels_of(eval_set));
}

}  // namespace qpool
