// Acceptance gate: one PASS/FAIL line per criterion. Exit status is nonzero
// if any gated criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "oracles.hpp"
#include "qpool/evaluation.hpp"
#include "qpool/random.hpp"
#include "qpool/reference.hpp"
#include "qpool/scoring.hpp"
#include "qpool/spectrogram.hpp"
#include "qpool/tuning.hpp"
#include "qpool/validation.hpp"
#include "test_util.hpp"

using namespace qpool;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << what << " (" << detail
            << ")" << std::endl;
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1 -------------------------------------------------------------------------

std::string oracle_quantile() {
  Rng rng(1001);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> v(1 + rng.uniform_below(100));
    for (double& x : v) x = t % 2 ? rng.normal() * 20.0 : static_cast<double>(rng.uniform_below(7));
    const double z = rng.uniform_open_closed() * (t % 10 ? 1.0 : 0.0);
    if (quantile(v, z) != oracle::quantile(v, z)) return "quantile mismatch at trial " + std::to_string(t);
  }
  return {};
}

std::string oracle_auc() {
  Rng rng(1002);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 2 + rng.uniform_below(199);
    std::vector<double> s(n);
    std::vector<Label> l(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.uniform_below(1 + n / 8));
      l[i] = rng.uniform_below(2) ? Label::Anormal : Label::Normal;
    }
    l[0] = Label::Anormal;
    l[1] = Label::Normal;
    if (roc_auc(s, l).auc != oracle::pairwise_auc(s, l)) return "auc mismatch at trial " + std::to_string(t);
  }
  return {};
}

std::string oracle_binomial() {
  const std::pair<unsigned, unsigned> levels[] = {{1, 10}, {1, 2}, {9, 10}, {99, 100}};
  for (unsigned n = 1; n <= 30; ++n) {
    for (auto [num, den] : levels) {
      const double z = static_cast<double>(num) / den;
      for (unsigned k = 0; k <= n; ++k) {
        const double lp = oracle::log_rational(oracle::pmf(k, n, num, den));
        if (std::abs(binomial_log_pmf(k, n, z) - lp) > 1e-10 * std::max(1.0, std::abs(lp))) {
          return "log_pmf n=" + std::to_string(n) + " k=" + std::to_string(k);
        }
        const double tail = oracle::tail_score(k, n, num, den);
        if (std::abs(binomial_tail_score(k, n, z) - tail) > 1e-10 * std::abs(tail) + 1e-15) {
          return "survival n=" + std::to_string(n) + " k=" + std::to_string(k);
        }
      }
    }
  }
  for (std::size_t n : {1u, 10u, 100u, 1000u}) {
    for (double z : {0.1, 0.5, 0.9, 0.99}) {
      double total = 0.0;
      for (std::size_t k = 0; k <= n; ++k) total += std::exp(binomial_log_pmf(k, n, z));
      if (std::abs(total - 1.0) > 1e-9) return "pmf sum n=" + std::to_string(n);
    }
  }
  return {};
}

std::string oracle_stft() {
  Rng rng(1004);
  for (int t = 0; t < 200; ++t) {
    StftConfig cfg;
    cfg.n_fft = 2 * (1 + rng.uniform_below(32));
    cfg.hop_length = 1 + rng.uniform_below(cfg.n_fft);
    std::vector<double> x(1 + rng.uniform_below(100));
    for (double& v : x) v = rng.normal();
    const auto got = stft_magnitude(x, cfg);
    const auto want = oracle::stft(x, cfg.n_fft, cfg.hop_length);
    double peak = 0.0;
    for (const auto& row : want) for (double v : row) peak = std::max(peak, v);
    for (std::size_t f = 0; f < got.rows; ++f) {
      for (std::size_t c = 0; c < got.cols; ++c) {
        if (std::abs(got(f, c) - want[f][c]) > 1e-9 * std::max(want[f][c], 1e-3 * peak) + 1e-300) {
          return "stft mismatch at trial " + std::to_string(t);
        }
      }
    }
  }
  std::vector<double> tone(16000);
  for (std::size_t i = 0; i < tone.size(); ++i) {
    tone[i] = std::sin(2 * std::numbers::pi * 1000.0 * static_cast<double>(i) / 16000.0);
  }
  const auto m = stft_magnitude(tone, StftConfig{});
  for (std::size_t c = 4; c + 4 < m.cols; ++c) {
    std::size_t peak = 0;
    for (std::size_t f = 1; f < m.rows; ++f) if (m(f, c) > m(peak, c)) peak = f;
    if (peak != 128) return "tone peak at bin " + std::to_string(peak);
  }
  return {};
}

void criterion1() {
  std::string problem;
  for (auto* check : {oracle_quantile, oracle_auc, oracle_binomial, oracle_stft}) {
    problem = check();
    if (!problem.empty()) break;
  }
  report(1, problem.empty(), "oracle suites (quantile, AUC, binomial, STFT)",
         problem.empty() ? "all exact/within tolerance" : problem);
}

// 2 -------------------------------------------------------------------------

void criterion2() {
  DatasetManifest m;
  for (int i = 0; i < 1011; ++i) m.entries.push_back({"n" + std::to_string(i), Label::Normal, "fan", "00", ""});
  for (int i = 0; i < 407; ++i) m.entries.push_back({"a" + std::to_string(i), Label::Anormal, "fan", "00", ""});
  bool ok = true;
  std::string detail;
  for (std::uint64_t seed : {0ULL, 1ULL, 2ULL, 3ULL, 4ULL, 12345ULL}) {
    const auto p = make_splits(m, seed);
    std::size_t va = 0, ta = 0;
    for (const auto& x : p.validation) va += x.label == Label::Anormal;
    for (const auto& x : p.test) ta += x.label == Label::Anormal;
    const bool this_ok = p.train.size() == 604 && va == 203 && p.validation.size() == 406 &&
                         ta == 204 && p.test.size() == 408;
    if (!this_ok) {
      detail = "seed " + std::to_string(seed) + ": " + std::to_string(p.train.size()) + "/" +
               std::to_string(va) + "+" + std::to_string(p.validation.size() - va) + "/" +
               std::to_string(ta) + "+" + std::to_string(p.test.size() - ta);
    }
    ok = ok && this_ok;
  }
  report(2, ok, "split arithmetic 604 / 203+203 / 204+204", ok ? "6 seeds" : detail);
}

// 3 -------------------------------------------------------------------------

void criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  SyntheticSpec spec;
  spec.rows = 64;
  spec.cols = 64;
  spec.seed = 2024;
  const auto normals = synth_generate(spec, 700);  // 500 train, 100 val, 100 test
  SyntheticSpec aspec = spec;
  aspec.seed = 2025;
  const auto anormals = synth_patch_anomalies(aspec, 200, 8, 1.0, 2026);  // 100 val, 100 test

  InMemorySource src;
  std::vector<std::string> train;
  std::vector<LabeledId> test;
  for (std::size_t i = 0; i < normals.size(); ++i) {
    const std::string id = "n" + std::to_string(i);
    src.add(id, normals[i]);
    if (i < 500) train.push_back(id);
    else if (i >= 600) test.push_back({id, Label::Normal});
  }
  for (std::size_t i = 100; i < anormals.size(); ++i) {
    const std::string id = "a" + std::to_string(i);
    src.add(id, anormals[i]);
    test.push_back({id, Label::Anormal});
  }
  const double auc = evaluate(src, train, test, 0.9, Metric::Mean, QuantileRule::Linear, 4).auc;
  const double secs = seconds_since(t0);
  report(3, auc >= 0.95 && secs < 60.0, "synthetic benchmark, z = 0.9, Mean, test AUC >= 0.95",
         "AUC " + fmt("%.4f", auc) + ", " + fmt("%.1f", secs) + " s");
}

// 4 -------------------------------------------------------------------------

bool exceedance_run(QuantileRule rule, std::string& detail, double& secs) {
  const auto t0 = std::chrono::steady_clock::now();
  SyntheticSpec spec;  // 100 x 100
  const std::vector<double> levels{0.5, 0.75, 0.9, 0.95, 0.99};
  const std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  const auto reports = exceedance_experiment(2000, 500, spec, levels, seeds, rule, 4);
  secs = seconds_since(t0);
  bool ok = true;
  for (const auto& r : reports) {
    ok = ok && r.relative_deviation < 0.02;
    if (!detail.empty()) detail += ", ";
    detail += "z=" + format_number(r.z) + ": " + fmt("%.2f%%", 100.0 * r.relative_deviation);
  }
  return ok;
}

void criterion4() {
  std::string detail;
  double secs = 0.0;
  const bool ok = exceedance_run(QuantileRule::Linear, detail, secs);
  report(4, ok && secs < 60.0, "binomial consistency, relative deviation < 2% for every z",
         detail + "; " + fmt("%.1f", secs) + " s");
  // Not gated: same experiment with the unbiased plotting-position rule.
  std::string weibull;
  const bool wok = exceedance_run(QuantileRule::Weibull, weibull, secs);
  std::cout << "INFO criterion 4 with --quantile-rule weibull: " << (wok ? "within" : "outside")
            << " 2% (" << weibull << ")" << std::endl;
}

// 5 -------------------------------------------------------------------------

void criterion5() {
  Rng rng(5005);
  const double specials[] = {4.9406564584124654e-324, -4.9406564584124654e-324, 2.2250738585072009e-308,
                             1.7976931348623157e308, -1.7976931348623157e308, -0.0, 0.0, 1e-300, 1e300};
  bool ok = true;
  for (int t = 0; t < 100 && ok; ++t) {
    Matrix m(1 + rng.uniform_below(40), 1 + rng.uniform_below(40));
    for (double& v : m.data) {
      v = rng.uniform_below(4) == 0 ? specials[rng.uniform_below(std::size(specials))]
                                    : std::ldexp(rng.normal(), static_cast<int>(rng.uniform_below(2000)) - 1000);
    }
    Spectrogram s;
    s.values = m;
    s.fingerprint = "fnv1a64:" + std::to_string(t);
    s.source_id = "m" + std::to_string(t);
    const auto s2 = decode_spectrogram(encode_spectrogram(s));
    ReferenceSpectrogram r;
    r.values = m;
    r.z = rng.uniform_open_closed();
    r.training_count = static_cast<std::uint32_t>(rng.uniform_below(100000));
    r.fingerprint = s.fingerprint;
    const auto r2 = decode_reference(encode_reference(r));
    const std::size_t bytes = m.size() * sizeof(double);
    ok = s2.values.same_shape(m) && r2.values.same_shape(m) &&
         std::memcmp(s2.values.data.data(), m.data.data(), bytes) == 0 &&
         std::memcmp(r2.values.data.data(), m.data.data(), bytes) == 0 &&
         std::memcmp(&r2.z, &r.z, sizeof r.z) == 0 && r2.training_count == r.training_count &&
         s2.fingerprint == s.fingerprint && r2.fingerprint == r.fingerprint;
  }
  report(5, ok, "SPEC1 and QREF1 bit-exact round trips", "100 random matrices");
}

// 6 -------------------------------------------------------------------------

int cli_call(std::vector<std::string> args) {
  args.insert(args.begin(), "qpool");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

void criterion6() {
  TempDir dir;
  const auto d = dir.path();
  bool ok = cli_call({"--seed", "6", "synth", "-o", (d / "corpus").string(), "--rows", "16", "--cols",
                      "16", "--normal", "60", "--anormal", "20", "--patch", "4", "--shift", "1"}) == 0;
  const std::string manifest = (d / "corpus" / "manifest.csv").string();
  ok = ok && cli_call({"--jobs", "1", "tune", manifest, "-o", (d / "a").string()}) == 0;
  ok = ok && cli_call({"--jobs", "4", "tune", manifest, "-o", (d / "b").string()}) == 0;
  std::string detail = "tuning.csv, results.csv, summary.csv identical";
  for (const char* name : {"tuning.csv", "results.csv", "summary.csv"}) {
    if (!ok) break;
    if (read_bytes(d / "a" / name) != read_bytes(d / "b" / name)) {
      ok = false;
      detail = std::string(name) + " differs";
    }
  }
  report(6, ok, "tune twice gives byte-identical CSVs", ok ? detail : (detail.empty() ? "run failed" : detail));
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  std::cout << "SKIP criterion 7: MIMII reproduction needs the external dataset" << std::endl;
  return failures == 0 ? 0 : 1;
}
