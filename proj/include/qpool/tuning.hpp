#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qpool/evaluation.hpp"
#include "qpool/reference.hpp"
#include "qpool/scoring.hpp"

namespace qpool {

struct GridConfig {
  std::vector<double> z_grid = {0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99};
  std::vector<Metric> metrics = {kAllMetrics.begin(), kAllMetrics.end()};

  /// Non-empty grids, every z in (0, 1).
  void validate() const;
};

struct GridCell {
  double z = 0.0;
  Metric metric = Metric::Counting;
  double auc = 0.0;
};

struct GridSearchResult {
  double best_z = 0.0;
  Metric best_metric = Metric::Counting;
  double validation_auc = 0.0;
  std::vector<GridCell> cells;                    // z-major, metrics in grid order
  std::vector<ReferenceSpectrogram> references;  // one per z_grid entry
};

/// Evaluates every (z, metric) cell on the validation set and returns the
/// argmax of validation AUC. Ties prefer the larger z, then the earlier metric
/// in Counting < Sum < Mean < Binomial order. Takes no test data.
GridSearchResult grid_search(const SampleSource& source, std::span<const std::string> train,
                             std::span<const LabeledId> validation, const GridConfig& grid,
                             QuantileRule rule = QuantileRule::Linear, std::size_t jobs = 1);

struct TuningRecord {
  std::size_t split = 0;  // 1-based position in the protocol
  std::uint64_t seed = 0;
  double best_z = 0.0;
  Metric best_metric = Metric::Counting;
  double validation_auc = 0.0;
  double test_auc = 0.0;
};

struct ProtocolResult {
  std::vector<TuningRecord> records;
  std::vector<std::vector<GridCell>> validation_cells;  // per record
  double mean_test_auc = 0.0;
};

/// For each plan: grid search on validation, then the tuned cell on test.
ProtocolResult run_plans(const SampleSource& source, std::span<const SplitPlan> plans,
                         const GridConfig& grid, QuantileRule rule = QuantileRule::Linear,
                         std::size_t jobs = 1);

/// make_splits per seed followed by run_plans.
ProtocolResult run_protocol(const SampleSource& source, const DatasetManifest& manifest,
                            std::span<const std::uint64_t> seeds, const GridConfig& grid,
                            QuantileRule rule = QuantileRule::Linear, std::size_t jobs = 1);

/// Shortest decimal that round-trips to the same double.
std::string format_number(double value);

/// Header: machine_type,machine_id,split,seed,z,metric,validation_auc,test_auc
std::string tuning_csv_header();
std::string tuning_csv_rows(const std::string& machine_type, const std::string& machine_id,
                            const ProtocolResult& result);

/// Header: machine_type,machine_id,seed,z,metric,split,auc. One validation row
/// per grid cell and one test row for the tuned cell, per seed.
std::string results_csv_header();
std::string results_csv_rows(const std::string& machine_type, const std::string& machine_id,
                             const ProtocolResult& result);

}  // namespace qpool
