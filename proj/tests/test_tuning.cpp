#include <algorithm>

#include "doctest.h"
#include "qpool/evaluation.hpp"
#include "qpool/tuning.hpp"
#include "qpool/validation.hpp"
#include "test_util.hpp"

using namespace qpool;

namespace {

// Gaussian normals, anormals with +shift on a fixed fraction of entries.
struct Corpus {
  InMemorySource source;
  DatasetManifest manifest;
};

Corpus make_corpus(std::size_t normals, std::size_t anormals, std::size_t patch, double shift,
                   std::uint64_t seed = 1) {
  SyntheticSpec spec;
  spec.rows = 20;
  spec.cols = 20;
  spec.seed = seed;
  Corpus c;
  auto n = synth_generate(spec, normals);
  SyntheticSpec aspec = spec;
  aspec.seed = seed + 1000;
  auto a = synth_patch_anomalies(aspec, anormals, patch, shift, seed + 2000);
  for (std::size_t i = 0; i < n.size(); ++i) {
    const std::string id = "n" + std::to_string(1000 + i);
    c.source.add(id, n[i]);
    c.manifest.entries.push_back({id, Label::Normal, "synth", "00", ""});
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::string id = "a" + std::to_string(1000 + i);
    c.source.add(id, a[i]);
    c.manifest.entries.push_back({id, Label::Anormal, "synth", "00", ""});
  }
  return c;
}

}  // namespace

TEST_CASE("default grid has 28 cells and validation_auc is the max") {
  auto c = make_corpus(60, 20, 4, 2.0);
  const auto plan = make_splits(c.manifest, 0);
  const auto r = grid_search(c.source, plan.train, plan.validation, GridConfig{});
  CHECK(r.cells.size() == 28);
  CHECK(r.references.size() == 7);
  double best = 0.0;
  for (const auto& cell : r.cells) best = std::max(best, cell.auc);
  CHECK(r.validation_auc == best);
  // z-major cell order
  CHECK(r.cells[0].z == 0.5);
  CHECK(r.cells[0].metric == Metric::Counting);
  CHECK(r.cells[3].metric == Metric::Binomial);
  CHECK(r.cells[4].z == 0.6);
}

TEST_CASE("single-cell grid returns that cell") {
  auto c = make_corpus(30, 10, 4, 0.0);  // no signal
  const auto plan = make_splits(c.manifest, 0);
  GridConfig grid;
  grid.z_grid = {0.7};
  grid.metrics = {Metric::Sum};
  const auto r = grid_search(c.source, plan.train, plan.validation, grid);
  CHECK(r.best_z == 0.7);
  CHECK(r.best_metric == Metric::Sum);
  CHECK(r.cells.size() == 1);
  CHECK(r.validation_auc == r.cells[0].auc);
}

TEST_CASE("ties prefer larger z then the earlier metric") {
  // Anormals are huge everywhere: every cell separates perfectly.
  auto c = make_corpus(30, 10, 20, 100.0);
  const auto plan = make_splits(c.manifest, 4);
  GridConfig grid;
  grid.z_grid = {0.6, 0.9, 0.8};
  grid.metrics = {Metric::Binomial, Metric::Mean, Metric::Sum};
  const auto r = grid_search(c.source, plan.train, plan.validation, grid);
  CHECK(r.validation_auc == 1.0);
  CHECK(r.best_z == 0.9);
  CHECK(r.best_metric == Metric::Sum);
}

TEST_CASE("small constant shifts favour magnitude metrics over counting") {
  // 4 of 400 entries shifted: 1% of the spectrogram.
  auto c = make_corpus(200, 60, 2, 1.5, 7);
  const auto plan = make_splits(c.manifest, 0);
  GridConfig grid;
  grid.z_grid = {0.99};
  const auto r = grid_search(c.source, plan.train, plan.validation, grid);
  const double counting = r.cells[0].auc;
  CHECK(std::max(r.cells[1].auc, r.cells[2].auc) > counting);
  const auto again = grid_search(c.source, plan.train, plan.validation, grid, QuantileRule::Linear, 3);
  CHECK(again.best_metric == r.best_metric);
  CHECK(again.validation_auc == r.validation_auc);
}

TEST_CASE("protocol on separable data") {
  auto c = make_corpus(40, 10, 20, 100.0);
  const std::vector<std::uint64_t> one{0};
  const auto r = run_protocol(c.source, c.manifest, one, GridConfig{});
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].test_auc == 1.0);
  CHECK(r.records[0].split == 1);
  CHECK(r.mean_test_auc == 1.0);
}

TEST_CASE("protocol on all-equal samples averages 0.5") {
  Corpus c;
  Spectrogram s;
  s.values = Matrix(2, 2, 1.0);
  s.fingerprint = "fp";
  for (int i = 0; i < 12; ++i) {
    const std::string id = "s" + std::to_string(i);
    c.source.add(id, s);
    c.manifest.entries.push_back({id, i < 4 ? Label::Anormal : Label::Normal, "t", "0", ""});
  }
  const std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  const auto r = run_protocol(c.source, c.manifest, seeds, GridConfig{});
  CHECK(r.records.size() == 5);
  CHECK(r.mean_test_auc == 0.5);
}

TEST_CASE("protocol determinism and csv output") {
  auto c = make_corpus(60, 20, 4, 1.0);
  const std::vector<std::uint64_t> seeds{0, 1, 2};
  GridConfig grid;
  grid.z_grid = {0.5, 0.9};
  const auto a = run_protocol(c.source, c.manifest, seeds, grid, QuantileRule::Linear, 1);
  const auto b = run_protocol(c.source, c.manifest, seeds, grid, QuantileRule::Linear, 4);
  CHECK(tuning_csv_rows("synth", "00", a) == tuning_csv_rows("synth", "00", b));
  CHECK(results_csv_rows("synth", "00", a) == results_csv_rows("synth", "00", b));
  CHECK(tuning_csv_header() == "machine_type,machine_id,split,seed,z,metric,validation_auc,test_auc\n");
  CHECK(results_csv_header() == "machine_type,machine_id,seed,z,metric,split,auc\n");
  const auto rows = results_csv_rows("synth", "00", a);
  // 8 validation cells plus one test row, per seed
  CHECK(std::count(rows.begin(), rows.end(), '\n') == 27);
}

TEST_CASE("grid validation and number formatting") {
  GridConfig bad;
  bad.z_grid = {};
  CHECK_THROWS_KIND(bad.validate(), ErrorKind::InvalidConfig);
  bad.z_grid = {1.0};
  CHECK_THROWS_KIND(bad.validate(), ErrorKind::InvalidConfig);
  bad.z_grid = {0.5};
  bad.metrics = {};
  CHECK_THROWS_KIND(bad.validate(), ErrorKind::InvalidConfig);
  CHECK(format_number(0.95) == "0.95");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.1 + 0.2) == "0.30000000000000004");
}
