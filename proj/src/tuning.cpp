#include "qpool/tuning.hpp"

#include <algorithm>
#include <charconv>
#include <iterator>

#include "qpool/error.hpp"

namespace qpool {

void GridConfig::validate() const {
  if (z_grid.empty()) throw Error(ErrorKind::InvalidConfig, "empty z grid");
  if (metrics.empty()) throw Error(ErrorKind::InvalidConfig, "empty metric grid");
  for (double z : z_grid) {
    if (!(z > 0.0 && z < 1.0)) {
      throw Error(ErrorKind::InvalidConfig, "grid z values must lie in (0, 1), got " +
                                                format_number(z));
    }
  }
}

namespace {

std::size_t metric_rank(Metric m) {
  return static_cast<std::size_t>(std::find(kAllMetrics.begin(), kAllMetrics.end(), m) -
                                  kAllMetrics.begin());
}

bool better(const GridCell& cand, const GridCell& best) {
  if (cand.auc != best.auc) return cand.auc > best.auc;
  if (cand.z != best.z) return cand.z > best.z;
  return metric_rank(cand.metric) < metric_rank(best.metric);
}

}  // namespace

GridSearchResult grid_search(const SampleSource& source, std::span<const std::string> train,
                             std::span<const LabeledId> validation, const GridConfig& grid,
                             QuantileRule rule, std::size_t jobs) {
  grid.validate();
  GridSearchResult result;
  {
    const auto loaded = load_all(source, train, jobs);
    std::vector<const Spectrogram*> ptrs;
    for (const auto& s : loaded) ptrs.push_back(s.get());
    result.references = build_references(ptrs, grid.z_grid, rule, jobs);
  }
  const auto labels = labels_of(validation);
  for (const auto& ref : result.references) {
    const auto scores = score_set(source, ref, validation, grid.metrics, jobs);
    for (std::size_t m = 0; m < grid.metrics.size(); ++m) {
      result.cells.push_back({ref.z, grid.metrics[m], roc_auc(scores[m], labels).auc});
    }
  }
  GridCell best = result.cells.front();
  for (const auto& cell : result.cells) {
    if (better(cell, best)) best = cell;
  }
  result.best_z = best.z;
  result.best_metric = best.metric;
  result.validation_auc = best.auc;
  return result;
}

ProtocolResult run_plans(const SampleSource& source, std::span<const SplitPlan> plans,
                         const GridConfig& grid, QuantileRule rule, std::size_t jobs) {
  if (plans.empty()) throw Error(ErrorKind::InvalidConfig, "no split plans / seeds");
  ProtocolResult out;
  double total = 0.0;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const SplitPlan& plan = plans[i];
    auto search = grid_search(source, plan.train, plan.validation, grid, rule, jobs);
    const auto z_index = static_cast<std::size_t>(
        std::find(grid.z_grid.begin(), grid.z_grid.end(), search.best_z) - grid.z_grid.begin());
    const Metric metrics[] = {search.best_metric};
    const auto scores = score_set(source, search.references[z_index], plan.test, metrics, jobs);
    const double test_auc = roc_auc(scores.front(), labels_of(plan.test)).auc;
    out.records.push_back({i + 1, plan.seed, search.best_z, search.best_metric,
                           search.validation_auc, test_auc});
    out.validation_cells.push_back(std::move(search.cells));
    total += test_auc;
  }
  out.mean_test_auc = total / static_cast<double>(plans.size());
  return out;
}

ProtocolResult run_protocol(const SampleSource& source, const DatasetManifest& manifest,
                            std::span<const std::uint64_t> seeds, const GridConfig& grid,
                            QuantileRule rule, std::size_t jobs) {
  std::vector<SplitPlan> plans;
  for (std::uint64_t seed : seeds) plans.push_back(make_splits(manifest, seed));
  return run_plans(source, plans, grid, rule, jobs);
}

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(std::begin(buf), std::end(buf), value);
  return std::string(buf, res.ptr);
}

std::string tuning_csv_header() {
  return "machine_type,machine_id,split,seed,z,metric,validation_auc,test_auc\n";
}

std::string tuning_csv_rows(const std::string& machine_type, const std::string& machine_id,
                            const ProtocolResult& result) {
  std::string out;
  for (const auto& r : result.records) {
    out += machine_type + ',' + machine_id + ',' + std::to_string(r.split) + ',' +
           std::to_string(r.seed) + ',' + format_number(r.best_z) + ',' +
           std::string(metric_name(r.best_metric)) + ',' + format_number(r.validation_auc) + ',' +
           format_number(r.test_auc) + '\n';
  }
  return out;
}

std::string results_csv_header() { return "machine_type,machine_id,seed,z,metric,split,auc\n"; }

std::string results_csv_rows(const std::string& machine_type, const std::string& machine_id,
                             const ProtocolResult& result) {
  std::string out;
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto& r = result.records[i];
    const std::string prefix = machine_type + ',' + machine_id + ',' + std::to_string(r.seed) + ',';
    for (const auto& cell : result.validation_cells[i]) {
      out += prefix + format_number(cell.z) + ',' + std::string(metric_name(cell.metric)) +
             ",validation," + format_number(cell.auc) + '\n';
    }
    out += prefix + format_number(r.best_z) + ',' + std::string(metric_name(r.best_metric)) +
           ",test," + format_number(r.test_auc) + '\n';
  }
  return out;
}

}  // namespace qpool
