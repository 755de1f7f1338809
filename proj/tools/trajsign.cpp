#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "trajsign/classify.hpp"
#include "trajsign/datagen.hpp"
#include "trajsign/errors.hpp"
#include "trajsign/features.hpp"
#include "trajsign/image.hpp"
#include "trajsign/parallel.hpp"
#include "trajsign/pnm.hpp"
#include "trajsign/version.hpp"

namespace fs = std::filesystem;
using namespace trajsign;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;        // bad flags, unreadable/invalid inputs
constexpr int kExitComputation = 3;  // failures while processing valid inputs

struct GlobalOpts {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string report_csv;
};

// Provenance block embedded as '#' comments in every report-like output.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> entries;

  void add(const std::string& key, const std::string& value) {
    entries.emplace_back(key, value);
  }
  void add(const std::string& key, double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", value);
    entries.emplace_back(key, buf);
  }
  void add(const std::string& key, long long value) {
    entries.emplace_back(key, std::to_string(value));
  }

  std::vector<std::string> lines() const {
    std::vector<std::string> out;
    out.push_back(std::string(kToolName) + " " + kToolVersion);
    out.push_back("command: " + command);
    for (const auto& [k, v] : entries) out.push_back(k + ": " + v);
    return out;
  }
};

void write_comments(std::ostream& out, const RunManifest& manifest) {
  for (const auto& line : manifest.lines()) out << "# " << line << "\n";
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

bool parse_sample_name(const std::string& name, SampleRecord& record) {
  int s = 0;
  int p = 0;
  int r = 0;
  char tail = 0;
  if (std::sscanf(name.c_str(), "s%d_p%d_r%d%c", &s, &p, &r, &tail) != 3) {
    return false;
  }
  if (s < 1 || p < 1 || r < 1) return false;
  record.sample_id = name;
  record.sign_code = s;
  record.subject_id = p;
  record.repetition = r;
  return true;
}

void write_split_csv(const fs::path& path, std::span<const Sample> samples,
                     const Split& split, const RunManifest& manifest) {
  auto out = open_output(path);
  write_comments(out, manifest);
  out << "kind,sample_id\n";
  for (std::size_t i : split.train) {
    out << "train," << samples[i].record.sample_id << "\n";
  }
  for (std::size_t i : split.test) {
    out << "test," << samples[i].record.sample_id << "\n";
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::map<std::string, std::string> read_split_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::map<std::string, std::string> kind_of;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!saw_header) {
      if (line != "kind,sample_id") {
        throw IoError("split parse error: unexpected header '" + line + "'");
      }
      saw_header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw IoError("split parse error: '" + line + "'");
    }
    const std::string kind = line.substr(0, comma);
    if (kind != "train" && kind != "test") {
      throw IoError("split parse error: unknown kind '" + kind + "'");
    }
    kind_of[line.substr(comma + 1)] = kind;
  }
  if (!saw_header) throw IoError("split parse error: missing header");
  return kind_of;
}

// Similarity-fits a 2 x T trajectory into the frame-safe box [0.15, 0.85].
Eigen::MatrixXd fit_unit_box(const Eigen::Ref<const Eigen::MatrixXd>& xy) {
  const Eigen::Vector2d lo = xy.rowwise().minCoeff();
  const Eigen::Vector2d hi = xy.rowwise().maxCoeff();
  const double extent = (hi - lo).maxCoeff();
  Eigen::MatrixXd out(2, xy.cols());
  if (extent < 1e-12) {
    out.setConstant(0.5);
    return out;
  }
  const Eigen::Vector2d center = 0.5 * (lo + hi);
  out = (0.7 / extent) * (xy.colwise() - center);
  out.array() += 0.5;
  return out;
}

struct SynthOpts {
  std::string out_dir;
  GenSpec spec;
  int frame_samples = 0;
  int frame_width = 96;
  int frame_height = 96;
  int radius = 6;
};

int run_synth(const GlobalOpts& global, const SynthOpts& opts) {
  GenSpec spec = opts.spec;
  spec.seed = global.seed;

  RunManifest manifest;
  manifest.command = "synth";
  manifest.add("seed", static_cast<long long>(spec.seed));
  manifest.add("classes", static_cast<long long>(spec.num_classes));
  manifest.add("subjects", static_cast<long long>(spec.num_subjects));
  manifest.add("reps", static_cast<long long>(spec.reps_per_subject));
  manifest.add("frames", std::to_string(spec.min_frames) + "-" +
                             std::to_string(spec.max_frames));
  manifest.add("noise_sigma", spec.noise_sigma);
  manifest.add("subject_offset_sigma", spec.subject_offset_sigma);
  manifest.add("subject_scale", std::to_string(spec.subject_scale_min) + "-" +
                                    std::to_string(spec.subject_scale_max));
  manifest.add("warp_strength", spec.warp_strength);
  manifest.add("out", opts.out_dir);

  const auto records =
      generate_dataset(spec, opts.out_dir, manifest.lines());
  std::cout << "wrote " << records.size() << " samples to " << opts.out_dir
            << "\n";

  if (opts.frame_samples > 0) {
    const auto samples = generate_samples(spec);
    const auto n = std::min<std::size_t>(
        static_cast<std::size_t>(opts.frame_samples), samples.size());
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::MatrixXd curve =
          fit_unit_box(samples[i].features.topRows(2));
      generate_frame_sequence(
          curve, opts.frame_width, opts.frame_height, opts.radius,
          fs::path(opts.out_dir) / "frames" / samples[i].record.sample_id);
    }
    std::cout << "wrote frame sequences for " << n << " samples\n";
  }
  return kExitOk;
}

struct ExtractOpts {
  std::string in_dir;
  std::string out_dir;
  FeatureSet feature_set = FeatureSet::kTrajectoryShape;
  TrackOptions track;
  double area_fraction = 0.001;
};

int run_extract(const GlobalOpts& global, const ExtractOpts& opts) {
  std::vector<fs::path> videos;
  for (const auto& entry : fs::directory_iterator(opts.in_dir)) {
    if (!entry.is_directory()) continue;
    SampleRecord probe;
    if (parse_sample_name(entry.path().filename().string(), probe)) {
      videos.push_back(entry.path());
    }
  }
  std::sort(videos.begin(), videos.end());
  if (videos.empty()) {
    throw IoError("no sNN_pNN_rNN video directories under " + opts.in_dir);
  }

  RunManifest manifest;
  manifest.command = "extract";
  manifest.add("in", opts.in_dir);
  manifest.add("out", opts.out_dir);
  manifest.add("feature_set", opts.feature_set == FeatureSet::kTrajectory
                                  ? "trajectory"
                                  : "trajectory-shape");
  manifest.add("diff_threshold",
               static_cast<long long>(opts.track.diff_threshold));
  manifest.add("tolerance", static_cast<long long>(opts.track.tolerance));
  manifest.add("max_gap", static_cast<long long>(opts.track.max_gap));
  manifest.add("glove_floor", static_cast<long long>(opts.track.glove_floor));
  manifest.add("area_fraction", opts.area_fraction);

  std::error_code ec;
  fs::create_directories(fs::path(opts.out_dir) / "features", ec);
  if (ec) throw IoError("cannot create " + opts.out_dir);

  std::vector<SampleRecord> extracted(videos.size());
  std::vector<std::string> errors(videos.size());
  parallel_for(videos.size(), global.threads, [&](std::size_t i) {
    const fs::path& video = videos[i];
    SampleRecord record;
    parse_sample_name(video.filename().string(), record);
    try {
      const auto frames = read_frame_directory(video);
      const auto area_px = static_cast<std::size_t>(std::max(
          1.0, opts.area_fraction * frames[0].width * frames[0].height));
      const std::size_t start =
          detect_start_frame(frames, opts.track.diff_threshold, area_px);
      const auto stats = track_hand(frames, start, opts.track);
      const Eigen::MatrixXd raw = assemble(stats, frames[0].width,
                                           frames[0].height, opts.feature_set);
      record.feature_path = "features/" + record.sample_id + ".csv";
      save_features_csv(fs::path(opts.out_dir) / record.feature_path,
                        interpolate(raw));
      extracted[i] = std::move(record);
    } catch (const std::exception& e) {
      errors[i] = video.filename().string() + ": " + e.what();
    }
  });

  std::vector<SampleRecord> records;
  std::vector<std::string> failures;
  for (std::size_t i = 0; i < videos.size(); ++i) {
    if (!errors[i].empty()) {
      failures.push_back(errors[i]);
    } else {
      records.push_back(std::move(extracted[i]));
    }
  }

  save_manifest_csv(fs::path(opts.out_dir) / "manifest.csv", records,
                    manifest.lines());
  std::cout << "extracted " << records.size() << "/" << videos.size()
            << " videos\n";
  if (!failures.empty()) {
    auto log = open_output(fs::path(opts.out_dir) / "errors.log");
    for (const auto& f : failures) {
      log << f << "\n";
      std::cerr << "error: " << f << "\n";
    }
    return kExitComputation;
  }
  return kExitOk;
}

struct SplitFlags {
  std::string kind = "random";
  double train_fraction = 0.2;
  int per_subject = 1;
  int train_subjects = 2;
};

Split make_split(const SplitFlags& flags, std::span<const Sample> samples,
                 std::uint64_t seed) {
  if (flags.kind == "random") {
    return split_random(samples, flags.train_fraction, seed);
  }
  if (flags.kind == "subject-dependent") {
    return split_subject_dependent(samples, flags.per_subject, seed);
  }
  return split_subject_independent(samples, flags.train_subjects, seed);
}

std::string describe_split(const SplitFlags& flags) {
  std::ostringstream out;
  out << flags.kind;
  if (flags.kind == "random") {
    out << " fraction=" << flags.train_fraction;
  } else if (flags.kind == "subject-dependent") {
    out << " per_subject=" << flags.per_subject;
  } else {
    out << " train_subjects=" << flags.train_subjects;
  }
  return out.str();
}

struct TrainFlags {
  int states = 12;
  int mixtures = 3;
  int iterations = 100;
  double tolerance = 1e-6;
  std::string topology = "ergodic";
  bool diagonal = false;
};

TrainConfig make_train_config(const TrainFlags& flags, std::uint64_t seed) {
  TrainConfig config;
  config.num_states = flags.states;
  config.num_mixtures = flags.mixtures;
  config.max_iterations = flags.iterations;
  config.rel_tolerance = flags.tolerance;
  config.seed = seed;
  config.topology = flags.topology == "left-right" ? Topology::kLeftRight
                                                   : Topology::kErgodic;
  config.diagonal_covariance = flags.diagonal;
  return config;
}

void add_train_flags(CLI::App* cmd, TrainFlags& flags) {
  cmd->add_option("--states", flags.states, "HMM states per sign")
      ->capture_default_str();
  cmd->add_option("--mixtures", flags.mixtures, "Gaussians per state")
      ->capture_default_str();
  cmd->add_option("--iterations", flags.iterations,
                  "Baum-Welch iteration cap")
      ->capture_default_str();
  cmd->add_option("--tolerance", flags.tolerance,
                  "relative log-likelihood stop tolerance")
      ->capture_default_str();
  cmd->add_option("--topology", flags.topology, "ergodic or left-right")
      ->check(CLI::IsMember({"ergodic", "left-right"}))
      ->capture_default_str();
  cmd->add_flag("--diagonal", flags.diagonal,
                "diagonal emission covariances");
}

void add_manifest_train_entries(RunManifest& manifest,
                                const TrainFlags& flags) {
  manifest.add("states", static_cast<long long>(flags.states));
  manifest.add("mixtures", static_cast<long long>(flags.mixtures));
  manifest.add("iterations", static_cast<long long>(flags.iterations));
  manifest.add("tolerance", flags.tolerance);
  manifest.add("topology", flags.topology);
  manifest.add("diagonal", flags.diagonal ? "true" : "false");
}

struct TrainOpts {
  std::string manifest_path;
  std::string bank_out = "model.bank";
  std::string split_out;
  SplitFlags split;
  TrainFlags train;
};

int run_train(const GlobalOpts& global, const TrainOpts& opts) {
  const auto samples = load_samples(opts.manifest_path);
  const Split split = make_split(opts.split, samples, global.seed);
  const auto train = gather(samples, split.train);

  RunManifest manifest;
  manifest.command = "train";
  manifest.add("seed", static_cast<long long>(global.seed));
  manifest.add("manifest", opts.manifest_path);
  manifest.add("split", describe_split(opts.split));
  add_manifest_train_entries(manifest, opts.train);
  manifest.add("bank", opts.bank_out);

  const TrainConfig config = make_train_config(opts.train, global.seed);
  const ModelBank bank = train_bank(train, config, global.threads);

  {
    auto out = open_output(opts.bank_out);
    write_comments(out, manifest);
    save_bank(out, bank);
    if (!out) throw IoError("failed writing " + opts.bank_out);
  }
  const std::string split_path =
      opts.split_out.empty() ? opts.bank_out + ".split.csv" : opts.split_out;
  write_split_csv(split_path, samples, split, manifest);

  std::cout << "trained " << bank.entries.size() << " models on "
            << train.size() << " samples; bank: " << opts.bank_out
            << ", split: " << split_path << "\n";
  return kExitOk;
}

struct EvalOpts {
  std::string bank_path;
  std::string manifest_path;
  std::string split_file;
  std::string confusion_csv;
  bool protocols = false;
  int runs = 10;
  SplitFlags split;
  TrainFlags train;
};

int run_eval(const GlobalOpts& global, const EvalOpts& opts) {
  const auto samples = load_samples(opts.manifest_path);

  if (opts.protocols) {
    ProtocolSuiteConfig config;
    config.train_fraction = opts.split.train_fraction;
    config.per_subject = opts.split.per_subject;
    config.train_subjects = opts.split.train_subjects;
    config.runs = opts.runs;
    config.train = make_train_config(opts.train, global.seed);

    RunManifest manifest;
    manifest.command = "eval";
    manifest.add("mode", "protocols");
    manifest.add("seed", static_cast<long long>(global.seed));
    manifest.add("manifest", opts.manifest_path);
    manifest.add("runs", static_cast<long long>(opts.runs));
    manifest.add("train_fraction", opts.split.train_fraction);
    manifest.add("per_subject", static_cast<long long>(opts.split.per_subject));
    manifest.add("train_subjects",
                 static_cast<long long>(opts.split.train_subjects));
    add_manifest_train_entries(manifest, opts.train);

    const auto results = run_protocol_suite(samples, config, global.threads);
    std::cout << format_protocol_summary(results);
    if (!global.report_csv.empty()) {
      auto out = open_output(global.report_csv);
      write_comments(out, manifest);
      write_protocol_csv(out, results);
    }
    return kExitOk;
  }

  if (opts.bank_path.empty()) {
    throw CLI::ValidationError("--bank is required unless --protocols is set");
  }
  const ModelBank bank = load_bank_file(opts.bank_path);
  std::vector<Sample> test;
  if (!opts.split_file.empty()) {
    const auto kind_of = read_split_csv(opts.split_file);
    for (const auto& s : samples) {
      const auto it = kind_of.find(s.record.sample_id);
      if (it != kind_of.end() && it->second == "test") test.push_back(s);
    }
  } else {
    test.assign(samples.begin(), samples.end());
  }

  RunManifest manifest;
  manifest.command = "eval";
  manifest.add("mode", "bank");
  manifest.add("seed", static_cast<long long>(global.seed));
  manifest.add("bank", opts.bank_path);
  manifest.add("manifest", opts.manifest_path);
  manifest.add("split_file",
               opts.split_file.empty() ? "(all samples)" : opts.split_file);

  EvalReport report = evaluate(bank, test, global.threads);
  report.seed = global.seed;
  report.split_descriptor =
      opts.split_file.empty() ? "all samples" : "test rows of " + opts.split_file;
  std::cout << format_report(report);

  if (!global.report_csv.empty()) {
    auto out = open_output(global.report_csv);
    write_comments(out, manifest);
    write_report_csv(out, report);
  }
  if (!opts.confusion_csv.empty()) {
    auto out = open_output(opts.confusion_csv);
    write_comments(out, manifest);
    write_confusion_csv(out, report);
  }
  return kExitOk;
}

struct CurveOpts {
  std::string manifest_path;
  std::string out = "curve.csv";
  std::vector<double> fractions = {0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
  int repeats = 10;
  TrainFlags train;
};

int run_curve(const GlobalOpts& global, const CurveOpts& opts) {
  const auto samples = load_samples(opts.manifest_path);
  const TrainConfig config = make_train_config(opts.train, global.seed);
  const auto curve =
      learning_curve(samples, opts.fractions, opts.repeats, config,
                     global.threads);

  RunManifest manifest;
  manifest.command = "curve";
  manifest.add("seed", static_cast<long long>(global.seed));
  manifest.add("manifest", opts.manifest_path);
  manifest.add("repeats", static_cast<long long>(opts.repeats));
  {
    std::ostringstream fr;
    for (std::size_t i = 0; i < opts.fractions.size(); ++i) {
      if (i > 0) fr << ",";
      fr << opts.fractions[i];
    }
    manifest.add("fractions", fr.str());
  }
  add_manifest_train_entries(manifest, opts.train);

  std::cout << format_curve(curve);
  {
    auto out = open_output(opts.out);
    write_comments(out, manifest);
    write_curve_csv(out, curve);
  }
  if (!global.report_csv.empty() && global.report_csv != opts.out) {
    auto out = open_output(global.report_csv);
    write_comments(out, manifest);
    write_curve_csv(out, curve);
  }
  return kExitOk;
}

void add_split_flags(CLI::App* cmd, SplitFlags& flags) {
  cmd->add_option("--split", flags.kind,
                  "random, subject-dependent, or subject-independent")
      ->check(CLI::IsMember(
          {"random", "subject-dependent", "subject-independent"}))
      ->capture_default_str();
  cmd->add_option("--train-fraction", flags.train_fraction,
                  "train share per class for random splits")
      ->capture_default_str();
  cmd->add_option("--per-subject", flags.per_subject,
                  "train samples per (sign, subject) pair")
      ->capture_default_str();
  cmd->add_option("--train-subjects", flags.train_subjects,
                  "whole subjects moved to train")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kToolName) + " " + kToolVersion +
               ": trajectory-based dynamic sign recognition"};
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 success, 2 input or configuration error, "
      "3 computation failure.");

  GlobalOpts global;
  app.add_option("--seed", global.seed, "base seed for all randomness")
      ->capture_default_str();
  app.add_option("--threads", global.threads, "worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--report-csv", global.report_csv,
                 "write a machine-readable report CSV here");

  SynthOpts synth;
  auto* synth_cmd =
      app.add_subcommand("synth", "generate a synthetic labeled corpus");
  synth_cmd->add_option("--out", synth.out_dir, "output directory")
      ->required();
  synth_cmd->add_option("--classes", synth.spec.num_classes, "sign classes")
      ->capture_default_str();
  synth_cmd->add_option("--subjects", synth.spec.num_subjects, "subjects")
      ->capture_default_str();
  synth_cmd
      ->add_option("--reps", synth.spec.reps_per_subject,
                   "repetitions per subject")
      ->capture_default_str();
  synth_cmd
      ->add_option("--min-frames", synth.spec.min_frames,
                   "minimum frames per sample")
      ->capture_default_str();
  synth_cmd
      ->add_option("--max-frames", synth.spec.max_frames,
                   "maximum frames per sample")
      ->capture_default_str();
  synth_cmd->add_option("--noise", synth.spec.noise_sigma, "coordinate jitter")
      ->capture_default_str();
  synth_cmd
      ->add_option("--offset-sigma", synth.spec.subject_offset_sigma,
                   "subject translation sigma")
      ->capture_default_str();
  synth_cmd
      ->add_option("--scale-min", synth.spec.subject_scale_min,
                   "subject scale lower bound")
      ->capture_default_str();
  synth_cmd
      ->add_option("--scale-max", synth.spec.subject_scale_max,
                   "subject scale upper bound")
      ->capture_default_str();
  synth_cmd
      ->add_option("--warp-strength", synth.spec.warp_strength,
                   "repetition speed-warp strength in [0, 1]")
      ->capture_default_str();
  synth_cmd
      ->add_option("--frames", synth.frame_samples,
                   "also render frame sequences for this many samples")
      ->capture_default_str();
  synth_cmd->add_option("--frame-width", synth.frame_width, "frame width")
      ->capture_default_str();
  synth_cmd->add_option("--frame-height", synth.frame_height, "frame height")
      ->capture_default_str();
  synth_cmd->add_option("--radius", synth.radius, "blob radius in pixels")
      ->capture_default_str();

  ExtractOpts extract;
  auto* extract_cmd = app.add_subcommand(
      "extract", "extract features from sNN_pNN_rNN frame directories");
  extract_cmd->add_option("--in", extract.in_dir, "directory of videos")
      ->required();
  extract_cmd->add_option("--out", extract.out_dir, "output directory")
      ->required();
  extract_cmd
      ->add_option_function<std::string>(
          "--feature-set",
          [&extract](const std::string& v) {
            extract.feature_set = v == "trajectory"
                                      ? FeatureSet::kTrajectory
                                      : FeatureSet::kTrajectoryShape;
          },
          "trajectory or trajectory-shape")
      ->check(CLI::IsMember({"trajectory", "trajectory-shape"}))
      ->default_str("trajectory-shape");
  extract_cmd
      ->add_option("--diff-threshold", extract.track.diff_threshold,
                   "start-detection intensity step")
      ->capture_default_str();
  extract_cmd
      ->add_option("--tolerance", extract.track.tolerance,
                   "region-growing intensity tolerance")
      ->capture_default_str();
  extract_cmd
      ->add_option("--max-gap", extract.track.max_gap,
                   "frames carried over a lost hand")
      ->capture_default_str();
  extract_cmd
      ->add_option("--glove-floor", extract.track.glove_floor,
                   "minimum seed brightness (<= 0 disables)")
      ->capture_default_str();
  extract_cmd
      ->add_option("--area-threshold", extract.area_fraction,
                   "start-detection changed-pixel share")
      ->capture_default_str();

  TrainOpts train;
  auto* train_cmd =
      app.add_subcommand("train", "train one model per sign on a split");
  train_cmd->add_option("--manifest", train.manifest_path, "dataset manifest")
      ->required();
  train_cmd->add_option("--out", train.bank_out, "model bank output path")
      ->capture_default_str();
  train_cmd->add_option("--split-out", train.split_out,
                        "split record path (default: <out>.split.csv)");
  add_split_flags(train_cmd, train.split);
  add_train_flags(train_cmd, train.train);

  EvalOpts eval;
  auto* eval_cmd = app.add_subcommand(
      "eval", "evaluate a bank on a split, or run the three protocols");
  eval_cmd->add_option("--manifest", eval.manifest_path, "dataset manifest")
      ->required();
  eval_cmd->add_option("--bank", eval.bank_path, "trained model bank");
  eval_cmd->add_option("--split-file", eval.split_file,
                       "evaluate only that file's test rows");
  eval_cmd->add_option("--confusion-csv", eval.confusion_csv,
                       "write the confusion matrix here");
  eval_cmd->add_flag("--protocols", eval.protocols,
                     "train and evaluate all three protocols");
  eval_cmd->add_option("--runs", eval.runs, "repetitions per protocol")
      ->capture_default_str();
  add_split_flags(eval_cmd, eval.split);
  add_train_flags(eval_cmd, eval.train);

  CurveOpts curve;
  auto* curve_cmd = app.add_subcommand(
      "curve", "accuracy as a function of the train fraction");
  curve_cmd->add_option("--manifest", curve.manifest_path, "dataset manifest")
      ->required();
  curve_cmd->add_option("--out", curve.out, "curve CSV output path")
      ->capture_default_str();
  curve_cmd->add_option("--fractions", curve.fractions, "train fractions")
      ->delimiter(',')
      ->capture_default_str();
  curve_cmd->add_option("--repeats", curve.repeats, "runs per fraction")
      ->capture_default_str();
  add_train_flags(curve_cmd, curve.train);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (synth_cmd->parsed()) return run_synth(global, synth);
    if (extract_cmd->parsed()) return run_extract(global, extract);
    if (train_cmd->parsed()) return run_train(global, train);
    if (eval_cmd->parsed()) return run_eval(global, eval);
    if (curve_cmd->parsed()) return run_curve(global, curve);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const DimensionMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InsufficientSamples& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InsufficientSubjects& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitComputation;
  }
  return kExitOk;
}
