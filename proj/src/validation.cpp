#include "qpool/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "qpool/error.hpp"
#include "qpool/parallel.hpp"
#include "qpool/random.hpp"
#include "qpool/tuning.hpp"

namespace qpool {

void SyntheticSpec::validate() const {
  if (rows == 0 || cols == 0) throw Error(ErrorKind::InvalidConfig, "synthetic shape must be non-empty");
  if (!(noise_sigma > 0.0)) throw Error(ErrorKind::InvalidConfig, "noise_sigma must be positive");
  if (entry_means.size() != 0 && (entry_means.rows != rows || entry_means.cols != cols)) {
    throw Error(ErrorKind::ShapeMismatch, "entry_means shape differs from rows x cols");
  }
}

std::string synthetic_fingerprint(const SyntheticSpec& spec) {
  return "synthetic:" + std::to_string(spec.rows) + "x" + std::to_string(spec.cols);
}

namespace {

Spectrogram draw_sample(const SyntheticSpec& spec, Rng& rng, std::string id) {
  Spectrogram s;
  s.values = Matrix(spec.rows, spec.cols);
  const bool has_means = spec.entry_means.size() != 0;
  for (std::size_t j = 0; j < s.values.size(); ++j) {
    const double mean = has_means ? spec.entry_means.data[j] : 0.0;
    s.values.data[j] = mean + spec.noise_sigma * rng.normal();
  }
  s.source_id = std::move(id);
  s.fingerprint = synthetic_fingerprint(spec);
  return s;
}

}  // namespace

std::vector<Spectrogram> synth_generate(const SyntheticSpec& spec, std::size_t count) {
  spec.validate();
  Rng rng(spec.seed);
  std::vector<Spectrogram> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(draw_sample(spec, rng, "synth-" + std::to_string(spec.seed) + "-" +
                                             std::to_string(i)));
  }
  return out;
}

std::vector<Spectrogram> synth_patch_anomalies(const SyntheticSpec& spec, std::size_t count,
                                               std::size_t patch_size, double shift,
                                               std::uint64_t seed) {
  spec.validate();
  if (patch_size == 0 || patch_size > spec.rows || patch_size > spec.cols) {
    throw Error(ErrorKind::InvalidConfig, "patch does not fit the synthetic shape");
  }
  Rng rng(seed);
  std::vector<Spectrogram> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Spectrogram s = draw_sample(spec, rng, "anomaly-" + std::to_string(seed) + "-" +
                                                std::to_string(i));
    const auto r0 = static_cast<std::size_t>(rng.uniform_below(spec.rows - patch_size + 1));
    const auto c0 = static_cast<std::size_t>(rng.uniform_below(spec.cols - patch_size + 1));
    for (std::size_t r = r0; r < r0 + patch_size; ++r) {
      for (std::size_t c = c0; c < c0 + patch_size; ++c) s.values(r, c) += shift;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ExceedanceReport> exceedance_experiment(std::size_t train_count,
                                                    std::size_t test_count,
                                                    const SyntheticSpec& spec,
                                                    std::span<const double> z_levels,
                                                    std::span<const std::uint64_t> split_seeds,
                                                    QuantileRule rule, std::size_t jobs) {
  if (train_count == 0 || test_count == 0) {
    throw Error(ErrorKind::InvalidConfig, "train and test counts must be positive");
  }
  if (split_seeds.empty()) throw Error(ErrorKind::InvalidConfig, "no split seeds");
  for (double z : z_levels) {
    if (!(z > 0.0 && z < 1.0)) throw Error(ErrorKind::DomainError, "z must lie in (0, 1)");
  }
  const auto pool = synth_generate(spec, train_count + test_count);
  const std::size_t n = spec.rows * spec.cols;

  // split_means[l][s]: mean exceedance count at level l for split s.
  std::vector<std::vector<double>> split_means(z_levels.size());
  for (std::uint64_t seed : split_seeds) {
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(std::span(order));

    std::vector<const Spectrogram*> train;
    for (std::size_t i = 0; i < train_count; ++i) train.push_back(&pool[order[i]]);
    const auto refs = build_references(train, z_levels, rule, jobs);

    std::vector<std::vector<std::size_t>> counts(z_levels.size(),
                                                 std::vector<std::size_t>(test_count));
    parallel_for(test_count, jobs, [&](std::size_t t) {
      const Matrix& w = pool[order[train_count + t]].values;
      for (std::size_t l = 0; l < refs.size(); ++l) {
        const Matrix& q = refs[l].values;
        std::size_t k = 0;
        for (std::size_t j = 0; j < n; ++j) k += w.data[j] > q.data[j] ? 1 : 0;
        counts[l][t] = k;
      }
    });
    for (std::size_t l = 0; l < z_levels.size(); ++l) {
      const double total = std::accumulate(counts[l].begin(), counts[l].end(), 0.0);
      split_means[l].push_back(total / static_cast<double>(test_count));
    }
  }

  std::vector<ExceedanceReport> reports;
  for (std::size_t l = 0; l < z_levels.size(); ++l) {
    ExceedanceReport r;
    r.z = z_levels[l];
    r.n = n;
    r.train_count = train_count;
    r.test_count = test_count;
    r.split_means = split_means[l];
    r.expected = (1.0 - r.z) * static_cast<double>(n);
    r.mean_count = std::accumulate(r.split_means.begin(), r.split_means.end(), 0.0) /
                   static_cast<double>(r.split_means.size());
    r.relative_deviation = std::abs(r.mean_count - r.expected) / r.expected;
    if (r.split_means.size() > 1) {
      double ss = 0.0;
      for (double m : r.split_means) {
        const double d = (m - r.mean_count) / r.expected;
        ss += d * d;
      }
      r.std_over_splits = std::sqrt(ss / static_cast<double>(r.split_means.size() - 1));
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

std::vector<double> granularity_limited_levels(std::size_t train_count,
                                               std::span<const double> z_levels) {
  std::vector<double> out;
  for (double z : z_levels) {
    // 1 - 0.9 is a hair below 0.1; don't flag levels sitting exactly on the boundary
    if (static_cast<double>(train_count) * (1.0 - z) < 1.0 - 1e-9) out.push_back(z);
  }
  return out;
}

std::string exceedance_csv(std::span<const ExceedanceReport> reports) {
  std::string out =
      "z,n,train_count,test_count,mean_count,expected,relative_deviation,std_over_seeds\n";
  for (const auto& r : reports) {
    out += format_number(r.z) + ',' + std::to_string(r.n) + ',' + std::to_string(r.train_count) +
           ',' + std::to_string(r.test_count) + ',' + format_number(r.mean_count) + ',' +
           format_number(r.expected) + ',' + format_number(r.relative_deviation) + ',' +
           format_number(r.std_over_splits) + '\n';
  }
  return out;
}

std::string exceedance_svg(std::span<const ExceedanceReport> reports) {
  constexpr double kWidth = 640, kHeight = 400, kLeft = 70, kRight = 20, kTop = 20, kBottom = 50;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  double y_max = 1.0;  // percent
  for (const auto& r : reports) {
    y_max = std::max(y_max, 100.0 * (r.relative_deviation + r.std_over_splits));
  }
  y_max *= 1.1;
  auto x_of = [&](double z) { return kLeft + z * plot_w; };
  auto y_of = [&](double pct) { return kTop + plot_h * (1.0 - pct / y_max); };

  std::ostringstream svg;
  char buf[256];
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<path d=\"M%.1f %.1f V%.1f H%.1f\" stroke=\"black\" fill=\"none\"/>\n", kLeft,
                kTop, kTop + plot_h, kLeft + plot_w);
  svg << buf;
  for (int i = 0; i <= 10; i += 2) {
    const double z = i / 10.0;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%.1f</text>\n", x_of(z),
                  kTop + plot_h + 18, z);
    svg << buf;
  }
  for (int i = 0; i <= 4; ++i) {
    const double pct = y_max * i / 4.0;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.2f</text>\n", kLeft - 6,
                  y_of(pct) + 4, pct);
    svg << buf;
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">z-quantile</text>\n",
                kLeft + plot_w / 2, kHeight - 10);
  svg << buf;
  std::snprintf(buf, sizeof buf,
                "<text transform=\"translate(16 %.1f) rotate(-90)\" text-anchor=\"middle\">"
                "relative deviation [%%]</text>\n",
                kTop + plot_h / 2);
  svg << buf;
  for (const auto& r : reports) {
    const double x = x_of(r.z);
    const double y = 100.0 * r.relative_deviation;
    const double e = 100.0 * r.std_over_splits;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"gray\"/>\n", x,
                  y_of(std::max(0.0, y - e)), x, y_of(y + e));
    svg << buf;
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"4\" fill=\"steelblue\"/>\n",
                  x, y_of(y));
    svg << buf;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace qpool
