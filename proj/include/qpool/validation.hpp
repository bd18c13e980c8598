#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qpool/matrix.hpp"
#include "qpool/reference.hpp"
#include "qpool/spectrogram.hpp"

namespace qpool {

/// I.i.d. Gaussian stand-in for real spectrograms: entry j of every sample is
/// entry_means[j] + N(0, noise_sigma^2).
struct SyntheticSpec {
  std::size_t rows = 100;
  std::size_t cols = 100;
  Matrix entry_means;  // empty means all zeros
  double noise_sigma = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Fingerprint shared by all samples of one SyntheticSpec shape.
std::string synthetic_fingerprint(const SyntheticSpec& spec);

/// Deterministic in (spec, count); sample i has source_id "synth-<seed>-<i>".
std::vector<Spectrogram> synth_generate(const SyntheticSpec& spec, std::size_t count);

/// Samples of `spec` with `shift` added to one uniformly placed
/// patch_size x patch_size block per sample. Uses its own stream seeded by
/// `seed`, independent of spec.seed.
std::vector<Spectrogram> synth_patch_anomalies(const SyntheticSpec& spec, std::size_t count,
                                               std::size_t patch_size, double shift,
                                               std::uint64_t seed);

struct ExceedanceReport {
  double z = 0.0;
  std::size_t n = 0;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  double mean_count = 0.0;          // mean exceedances per test sample, averaged over splits
  double expected = 0.0;            // (1 - z) n
  double relative_deviation = 0.0;  // |mean_count - expected| / expected
  double std_over_splits = 0.0;     // sample std of per-split (mean - expected) / expected
  std::vector<double> split_means;
};

/// Generates one pool of train_count + test_count samples from `spec`, then
/// for every split seed shuffles it, uses the first train_count samples as
/// training data and counts per-sample exceedances on the rest.
std::vector<ExceedanceReport> exceedance_experiment(std::size_t train_count,
                                                    std::size_t test_count,
                                                    const SyntheticSpec& spec,
                                                    std::span<const double> z_levels,
                                                    std::span<const std::uint64_t> split_seeds,
                                                    QuantileRule rule = QuantileRule::Linear,
                                                    std::size_t jobs = 1);

/// Levels where train_count (1 - z) < 1: the reference is then (almost) the
/// training maximum and the exceedance rate is limited by granularity.
std::vector<double> granularity_limited_levels(std::size_t train_count,
                                               std::span<const double> z_levels);

/// Header: z,n,train_count,test_count,mean_count,expected,relative_deviation,std_over_seeds
std::string exceedance_csv(std::span<const ExceedanceReport> reports);

/// Relative deviation (percent) against z, with one-std error bars.
std::string exceedance_svg(std::span<const ExceedanceReport> reports);

}  // namespace qpool
