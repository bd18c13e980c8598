#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "CLI11.hpp"
#include "qpool/audio_io.hpp"
#include "qpool/error.hpp"
#include "qpool/evaluation.hpp"
#include "qpool/parallel.hpp"
#include "qpool/pipeline.hpp"
#include "qpool/reference.hpp"
#include "qpool/scoring.hpp"
#include "qpool/spectrogram.hpp"
#include "qpool/tuning.hpp"
#include "qpool/validation.hpp"

namespace qpool::cli {
namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open for writing: " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::UnreadablePath, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

void ensure_parent(const fs::path& file) {
  if (file.has_parent_path()) ensure_dir(file.parent_path());
}

/// Files given directly are kept; directories contribute their *.spec and
/// *.wav files (non-recursive). The result is sorted and de-duplicated.
std::vector<std::string> expand_inputs(const std::vector<std::string>& inputs) {
  std::set<std::string> out;
  for (const auto& in : inputs) {
    std::error_code ec;
    if (fs::is_directory(in, ec)) {
      for (const auto& entry : fs::directory_iterator(in, ec)) {
        const auto ext = entry.path().extension().string();
        if (entry.is_regular_file() && (ext == ".spec" || ext == ".wav")) {
          out.insert(entry.path().lexically_normal().string());
        }
      }
      if (ec) throw Error(ErrorKind::UnreadablePath, in + ": " + ec.message());
    } else if (fs::is_regular_file(in, ec)) {
      out.insert(fs::path(in).lexically_normal().string());
    } else {
      throw Error(ErrorKind::UnreadablePath, "no such file or directory: " + in);
    }
  }
  if (out.empty()) throw Error(ErrorKind::EmptyInput, "no input files");
  return {out.begin(), out.end()};
}

DatasetManifest read_manifest(const std::string& path) {
  std::error_code ec;
  return scan_dataset(path, fs::is_directory(path, ec) ? LayoutRule::Mimii : LayoutRule::Csv);
}

/// Unique output names derived from input stems, in input order.
std::vector<std::string> output_stems(const std::vector<std::string>& inputs) {
  std::map<std::string, int> seen;
  std::vector<std::string> out;
  for (const auto& in : inputs) {
    std::string stem = fs::path(in).stem().string();
    const int n = ++seen[stem];
    if (n > 1) stem += "_" + std::to_string(n);
    out.push_back(stem);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidConfig, "not a number: '" + item + "'");
    }
  }
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidConfig, "not a seed: '" + item + "'");
    }
  }
  return out;
}

struct GlobalOptions {
  std::string config_path;
  std::size_t jobs = 0;  // 0: take from config
  std::optional<std::uint64_t> seed;
};

struct PreprocessFlags {
  std::optional<std::size_t> channel;
  std::optional<std::size_t> n_fft;
  std::optional<std::size_t> hop;
  bool no_center = false;
  std::optional<double> ref_value;
  std::optional<double> amin;
  std::optional<double> top_db;
  bool no_top_db = false;
  std::optional<std::uint32_t> sample_rate;

  void attach(CLI::App& cmd) {
    cmd.add_option("--channel", channel, "Channel index of multi-channel WAVs (default 0)");
    cmd.add_option("--n-fft", n_fft, "STFT window length (default 2048)");
    cmd.add_option("--hop", hop, "STFT hop length (default n_fft/4)");
    cmd.add_flag("--no-center", no_center, "Do not zero-pad n_fft/2 on both ends");
    cmd.add_option("--ref", ref_value, "dB reference amplitude (default 1.0)");
    cmd.add_option("--amin", amin, "Amplitude floor (default 1e-5)");
    cmd.add_option("--top-db", top_db, "Dynamic range limit in dB (default 80)");
    cmd.add_flag("--no-top-db", no_top_db, "Disable the dynamic range limit");
    cmd.add_option("--sample-rate", sample_rate, "Required WAV sample rate, 0 = any (default 16000)");
  }

  void apply(RunConfig& cfg) const {
    if (channel) cfg.channel = *channel;
    if (n_fft) cfg.stft.n_fft = *n_fft;
    if (hop) cfg.stft.hop_length = *hop;
    if (no_center) cfg.stft.center = false;
    if (ref_value) cfg.db.ref_value = *ref_value;
    if (amin) cfg.db.amin = *amin;
    if (top_db) cfg.db.top_db = *top_db;
    if (no_top_db) cfg.db.top_db.reset();
    if (sample_rate) cfg.sample_rate = *sample_rate;
  }
};

class Commands {
 public:
  Commands(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  RunConfig base_config() const {
    RunConfig cfg;
    if (!global.config_path.empty()) cfg = run_config_from_json(read_text(global.config_path));
    if (global.jobs != 0) cfg.jobs = global.jobs;
    return cfg;
  }

  void write_run_config(const RunConfig& cfg, const fs::path& path) const {
    write_text(path, run_config_to_json(cfg));
  }

  void spectrogram(const std::vector<std::string>& inputs, const std::string& output,
                   const PreprocessFlags& flags) {
    RunConfig cfg = base_config();
    flags.apply(cfg);
    cfg.validate();
    const auto files = expand_inputs(inputs);
    const bool to_dir = files.size() > 1 || fs::is_directory(output) ||
                        fs::path(output).extension() != ".spec";
    std::vector<fs::path> targets;
    if (to_dir) {
      ensure_dir(output);
      for (const auto& stem : output_stems(files)) targets.push_back(fs::path(output) / (stem + ".spec"));
    } else {
      ensure_parent(output);
      targets.push_back(output);
    }
    parallel_for(files.size(), cfg.jobs, [&](std::size_t i) {
      save_spectrogram(load_sample(files[i], cfg), targets[i]);
    });
    write_run_config(cfg, to_dir ? fs::path(output) / "run_config.json"
                                 : fs::path(output + ".run.json"));
    for (const auto& t : targets) out_ << t.string() << '\n';
  }

  void fit(const std::vector<std::string>& inputs, const std::string& manifest_path, double z,
           const std::string& rule, const std::string& output, const PreprocessFlags& flags) {
    RunConfig cfg = base_config();
    flags.apply(cfg);
    if (!rule.empty()) cfg.quantile_rule = parse_quantile_rule(rule);
    cfg.validate();
    std::vector<std::string> files;
    if (!manifest_path.empty()) {
      for (const auto& e : read_manifest(manifest_path).entries) {
        if (e.label == Label::Normal) files.push_back(e.path);
      }
      if (files.empty()) throw Error(ErrorKind::EmptyInput, "manifest has no normal samples");
    }
    if (!inputs.empty()) {
      const auto more = expand_inputs(inputs);
      files.insert(files.end(), more.begin(), more.end());
    }
    if (files.empty()) throw Error(ErrorKind::EmptyInput, "no training inputs");

    FileSource source(cfg);
    const auto loaded = load_all(source, files, cfg.jobs);
    std::vector<const Spectrogram*> ptrs;
    for (const auto& s : loaded) ptrs.push_back(s.get());
    const double levels[] = {z};
    const auto ref = build_references(ptrs, levels, cfg.quantile_rule, cfg.jobs).front();
    ensure_parent(output);
    save_reference(ref, output);
    write_run_config(cfg, output + ".run.json");
    out_ << output << ": " << ref.values.rows << "x" << ref.values.cols << " reference, z = "
         << format_number(z) << ", N = " << ref.training_count << '\n';
  }

  void score(const std::string& ref_path, const std::vector<std::string>& inputs,
             const std::string& metric_arg, const std::string& output,
             const std::string& explain_dir, const std::string& explain_format,
             const PreprocessFlags& flags) {
    RunConfig cfg = base_config();
    flags.apply(cfg);
    cfg.validate();
    const auto ref = load_reference(ref_path);
    std::vector<Metric> metrics;
    if (metric_arg == "all") {
      metrics.assign(kAllMetrics.begin(), kAllMetrics.end());
    } else {
      metrics.push_back(parse_metric(metric_arg));
    }
    const bool want_image = explain_format == "image" || explain_format == "both";
    const bool want_matrix = explain_format == "matrix" || explain_format == "both";
    if (!want_image && !want_matrix) {
      throw Error(ErrorKind::InvalidConfig, "explain format must be image, matrix or both");
    }
    const auto files = expand_inputs(inputs);
    const auto stems = output_stems(files);
    if (!explain_dir.empty()) ensure_dir(explain_dir);

    std::vector<std::vector<AnomalyScore>> results(files.size());
    parallel_for(files.size(), cfg.jobs, [&](std::size_t i) {
      const auto diff = difference_spectrogram(load_sample(files[i], cfg), ref);
      for (Metric m : metrics) results[i].push_back(score_difference(diff, m));
      if (!explain_dir.empty()) {
        if (want_image) {
          export_explanation(diff, fs::path(explain_dir) / (stems[i] + ".pgm"), ExplainFormat::Image);
        }
        if (want_matrix) {
          export_explanation(diff, fs::path(explain_dir) / (stems[i] + ".diff.spec"),
                             ExplainFormat::Matrix);
        }
      }
    });

    std::string csv = "path,metric,value,k,n,z,log_pmf\n";
    for (std::size_t i = 0; i < files.size(); ++i) {
      for (const auto& s : results[i]) {
        csv += files[i] + ',' + std::string(metric_name(s.metric)) + ',' + format_number(s.value) +
               ',' + std::to_string(s.k) + ',' + std::to_string(s.n) + ',' + format_number(s.z) +
               ',' + (s.log_pmf ? format_number(*s.log_pmf) : std::string()) + '\n';
      }
    }
    if (output.empty() || output == "-") {
      out_ << csv;
    } else {
      ensure_parent(output);
      write_text(output, csv);
      write_run_config(cfg, output + ".run.json");
    }
  }

  void tune(const std::string& manifest_path, const std::string& grid_path,
            const std::vector<std::string>& plan_paths, const std::string& rule,
            const std::string& output_dir, const PreprocessFlags& flags) {
    RunConfig cfg = base_config();
    if (!grid_path.empty()) cfg = run_config_from_json(read_text(grid_path), cfg);
    flags.apply(cfg);
    if (!rule.empty()) cfg.quantile_rule = parse_quantile_rule(rule);
    if (global.seed) cfg.seeds = {*global.seed};
    cfg.validate();

    const DatasetManifest manifest = read_manifest(manifest_path);
    std::map<std::tuple<std::string, std::string, std::string>, DatasetManifest> groups;
    std::set<std::string> snrs;
    for (const auto& e : manifest.entries) {
      groups[{e.machine_type, e.machine_id, e.snr}].entries.push_back(e);
      snrs.insert(e.snr);
    }
    if (snrs.size() > 1) {
      throw Error(ErrorKind::InvalidConfig,
                  "manifest mixes several SNR levels; tune one level at a time");
    }
    std::vector<SplitPlan> plans;
    for (const auto& p : plan_paths) plans.push_back(load_split_plan(p));
    if (!plans.empty() && groups.size() != 1) {
      throw Error(ErrorKind::InvalidConfig, "--plan requires a manifest with a single machine");
    }

    FileSource source(cfg);
    std::string tuning = tuning_csv_header();
    std::string results = results_csv_header();
    std::string summary = "machine_type,machine_id,seeds,mean_test_auc\n";
    for (const auto& [key, group] : groups) {
      const auto& [type, id, snr] = key;
      if (plans.empty()) {
        for (auto seed : cfg.seeds) plans.push_back(make_splits(group, seed));
      }
      const auto protocol = run_plans(source, plans, cfg.grid, cfg.quantile_rule, cfg.jobs);
      tuning += tuning_csv_rows(type, id, protocol);
      results += results_csv_rows(type, id, protocol);
      std::string seeds;
      for (const auto& plan : plans) seeds += (seeds.empty() ? "" : " ") + std::to_string(plan.seed);
      summary += type + ',' + id + ',' + seeds + ',' + format_number(protocol.mean_test_auc) + '\n';
      out_ << type << " id " << id << ": mean test AUC " << format_number(protocol.mean_test_auc)
           << " over " << plans.size() << " split(s)\n";
      plans.clear();
    }
    ensure_dir(output_dir);
    write_text(fs::path(output_dir) / "tuning.csv", tuning);
    write_text(fs::path(output_dir) / "results.csv", results);
    write_text(fs::path(output_dir) / "summary.csv", summary);
    write_run_config(cfg, fs::path(output_dir) / "run_config.json");
  }

  void split(const std::string& manifest_path, const std::string& output) {
    base_config().validate();
    const auto plan = make_splits(read_manifest(manifest_path), global.seed.value_or(0));
    if (output.empty() || output == "-") {
      out_ << split_plan_to_json(plan);
    } else {
      ensure_parent(output);
      save_split_plan(plan, output);
    }
  }

  struct ValidateArgs {
    std::size_t rows = 100;
    std::size_t cols = 100;
    std::size_t train = 2000;
    std::size_t test = 500;
    std::string z_list = "0.5,0.75,0.9,0.95,0.99";
    std::string split_seeds = "0,1,2,3,4";
    double sigma = 1.0;
    std::string rule;
    std::string output;
    std::string svg;
  };

  void validate_binomial(const ValidateArgs& a) {
    RunConfig cfg = base_config();
    if (!a.rule.empty()) cfg.quantile_rule = parse_quantile_rule(a.rule);
    SyntheticSpec spec;
    spec.rows = a.rows;
    spec.cols = a.cols;
    spec.noise_sigma = a.sigma;
    spec.seed = global.seed.value_or(0);
    const auto levels = parse_double_list(a.z_list);
    const auto seeds = parse_seed_list(a.split_seeds);
    for (double z : granularity_limited_levels(a.train, levels)) {
      err_ << "warning: z = " << format_number(z) << " with " << a.train
           << " training samples gives train_count*(1-z) < 1; the reference is limited by "
              "quantile granularity\n";
    }
    const auto reports =
        exceedance_experiment(a.train, a.test, spec, levels, seeds, cfg.quantile_rule, cfg.jobs);
    const std::string csv = exceedance_csv(reports);
    if (a.output.empty() || a.output == "-") {
      out_ << csv;
    } else {
      ensure_parent(a.output);
      write_text(a.output, csv);
      write_run_config(cfg, a.output + ".run.json");
    }
    if (!a.svg.empty()) {
      ensure_parent(a.svg);
      write_text(a.svg, exceedance_svg(reports));
    }
  }

  struct SynthArgs {
    std::string output;
    std::size_t rows = 64;
    std::size_t cols = 64;
    std::size_t normal = 700;
    std::size_t anormal = 200;
    std::size_t patch = 8;
    double shift = 1.0;
    double sigma = 1.0;
    std::string machine_type = "synthetic";
    std::string machine_id = "00";
  };

  void synth(const SynthArgs& a) {
    RunConfig cfg = base_config();
    SyntheticSpec spec;
    spec.rows = a.rows;
    spec.cols = a.cols;
    spec.noise_sigma = a.sigma;
    spec.seed = global.seed.value_or(0);
    const auto normals = synth_generate(spec, a.normal);
    const auto anomalies =
        synth_patch_anomalies(spec, a.anormal, a.patch, a.shift, spec.seed + 0x9e3779b97f4a7c15ULL);

    const fs::path root(a.output);
    const fs::path machine_dir = fs::path(a.machine_type) / ("id_" + a.machine_id);
    ensure_dir(root / machine_dir / "normal");
    ensure_dir(root / machine_dir / "abnormal");
    DatasetManifest manifest;
    auto emit = [&](const std::vector<Spectrogram>& samples, Label label, const char* dir) {
      for (std::size_t i = 0; i < samples.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "%06zu.spec", i);
        const fs::path rel = machine_dir / dir / name;
        save_spectrogram(samples[i], root / rel);
        manifest.entries.push_back({rel.string(), label, a.machine_type, a.machine_id, ""});
      }
    };
    emit(normals, Label::Normal, "normal");
    emit(anomalies, Label::Anormal, "abnormal");
    std::sort(manifest.entries.begin(), manifest.entries.end(),
              [](const ManifestEntry& x, const ManifestEntry& y) { return x.path < y.path; });
    write_manifest_csv(manifest, root / "manifest.csv");
    write_run_config(cfg, root / "run_config.json");
    out_ << (root / "manifest.csv").string() << ": " << a.normal << " normal, " << a.anormal
         << " anormal\n";
  }

  GlobalOptions global;

 private:
  std::ostream& out_;
  std::ostream& err_;
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Commands cmds(out, err);
  CLI::App app{"Quantile-pooling anomaly detection for sound spectrograms", "qpool"};
  app.require_subcommand(1);
  app.add_option("--config", cmds.global.config_path, "Run configuration (JSON)")
      ->check(CLI::ExistingFile);
  app.add_option("--jobs", cmds.global.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", cmds.global.seed, "Seed for split, synth and validate-binomial");

  std::function<void()> action;

  // spectrogram
  auto* spec_cmd = app.add_subcommand("spectrogram", "Compute SPEC1 spectrograms from WAV files");
  std::vector<std::string> spec_inputs;
  std::string spec_output;
  PreprocessFlags spec_flags;
  spec_cmd->add_option("inputs", spec_inputs, "WAV files or directories")->required();
  spec_cmd->add_option("-o,--output", spec_output, "Output .spec file or directory")->required();
  spec_flags.attach(*spec_cmd);
  spec_cmd->callback([&] { action = [&] { cmds.spectrogram(spec_inputs, spec_output, spec_flags); }; });

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Pool training spectrograms into a QREF1 reference");
  std::vector<std::string> fit_inputs;
  std::string fit_manifest;
  std::string fit_output;
  std::string fit_rule;
  double fit_z = 0.99;
  PreprocessFlags fit_flags;
  fit_cmd->add_option("inputs", fit_inputs, "SPEC1/WAV files or directories");
  fit_cmd->add_option("--manifest", fit_manifest, "Manifest CSV or MIMII directory (normal entries are used)");
  fit_cmd->add_option("--z", fit_z, "Quantile level in [0, 1] (default 0.99)")
      ->check(CLI::Range(0.0, 1.0));
  fit_cmd->add_option("--quantile-rule", fit_rule, "linear (default) or weibull");
  fit_cmd->add_option("-o,--output", fit_output, "Output .qref file")->required();
  fit_flags.attach(*fit_cmd);
  fit_cmd->callback([&] {
    action = [&] { cmds.fit(fit_inputs, fit_manifest, fit_z, fit_rule, fit_output, fit_flags); };
  });

  // score
  auto* score_cmd = app.add_subcommand("score", "Score spectrograms against a reference");
  std::string score_ref;
  std::vector<std::string> score_inputs;
  std::string score_metric = "mean";
  std::string score_output;
  std::string explain_dir;
  std::string explain_format = "image";
  PreprocessFlags score_flags;
  score_cmd->add_option("reference", score_ref, "QREF1 reference")->required();
  score_cmd->add_option("inputs", score_inputs, "SPEC1/WAV files or directories")->required();
  score_cmd->add_option("--metric", score_metric, "counting, sum, mean, binomial or all");
  score_cmd->add_option("-o,--output", score_output, "Output CSV (default stdout)");
  score_cmd->add_option("--explain-dir", explain_dir, "Write difference spectrograms here");
  score_cmd->add_option("--explain-format", explain_format, "image (PGM), matrix (SPEC1) or both");
  score_flags.attach(*score_cmd);
  score_cmd->callback([&] {
    action = [&] {
      cmds.score(score_ref, score_inputs, score_metric, score_output, explain_dir, explain_format,
                 score_flags);
    };
  });

  // tune
  auto* tune_cmd = app.add_subcommand("tune", "Grid search and multi-seed test protocol");
  std::string tune_manifest;
  std::string tune_grid;
  std::vector<std::string> tune_plans;
  std::string tune_rule;
  std::string tune_output;
  PreprocessFlags tune_flags;
  tune_cmd->add_option("manifest", tune_manifest, "Manifest CSV or MIMII directory")->required();
  tune_cmd->add_option("--grid", tune_grid, "JSON with z_grid, metrics, seeds")
      ->check(CLI::ExistingFile);
  tune_cmd->add_option("--plan", tune_plans, "Split-plan JSON files to use instead of seeds");
  tune_cmd->add_option("--quantile-rule", tune_rule, "linear (default) or weibull");
  tune_cmd->add_option("-o,--output", tune_output, "Output directory")->required();
  tune_flags.attach(*tune_cmd);
  tune_cmd->callback([&] {
    action = [&] { cmds.tune(tune_manifest, tune_grid, tune_plans, tune_rule, tune_output, tune_flags); };
  });

  // split
  auto* split_cmd = app.add_subcommand("split", "Export a train/validation/test split plan");
  std::string split_manifest;
  std::string split_output;
  split_cmd->add_option("manifest", split_manifest, "Manifest CSV or MIMII directory")->required();
  split_cmd->add_option("-o,--output", split_output, "Output JSON (default stdout)");
  split_cmd->callback([&] { action = [&] { cmds.split(split_manifest, split_output); }; });

  // validate-binomial
  auto* val_cmd = app.add_subcommand("validate-binomial",
                                     "Exceedance counts versus the binomial expectation");
  Commands::ValidateArgs val;
  val_cmd->add_option("--rows", val.rows)->check(CLI::PositiveNumber);
  val_cmd->add_option("--cols", val.cols)->check(CLI::PositiveNumber);
  val_cmd->add_option("--train", val.train, "Training samples per split")->check(CLI::PositiveNumber);
  val_cmd->add_option("--test", val.test, "Test samples per split")->check(CLI::PositiveNumber);
  val_cmd->add_option("--z", val.z_list, "Comma-separated quantile levels");
  val_cmd->add_option("--split-seeds", val.split_seeds, "Comma-separated split seeds");
  val_cmd->add_option("--sigma", val.sigma, "Noise standard deviation");
  val_cmd->add_option("--quantile-rule", val.rule, "linear (default) or weibull");
  val_cmd->add_option("-o,--output", val.output, "Report CSV (default stdout)");
  val_cmd->add_option("--svg", val.svg, "Optional SVG plot");
  val_cmd->callback([&] { action = [&] { cmds.validate_binomial(val); }; });

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic labeled SPEC1 corpus");
  Commands::SynthArgs syn;
  synth_cmd->add_option("-o,--output", syn.output, "Output directory")->required();
  synth_cmd->add_option("--rows", syn.rows)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--cols", syn.cols)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--normal", syn.normal, "Normal sample count");
  synth_cmd->add_option("--anormal", syn.anormal, "Anormal sample count");
  synth_cmd->add_option("--patch", syn.patch, "Anomaly patch edge length");
  synth_cmd->add_option("--shift", syn.shift, "Value added inside the patch");
  synth_cmd->add_option("--sigma", syn.sigma, "Noise standard deviation");
  synth_cmd->add_option("--machine-type", syn.machine_type);
  synth_cmd->add_option("--machine-id", syn.machine_id);
  synth_cmd->callback([&] { action = [&] { cmds.synth(syn); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  try {
    action();
    return 0;
  } catch (const Error& e) {
    err << error_name(e.kind()) << ": " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "InternalError: " << e.what() << '\n';
  }
  return 1;
}

}  // namespace qpool::cli
