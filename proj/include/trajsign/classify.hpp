#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "trajsign/hmm.hpp"

namespace trajsign {

struct SampleRecord {
  std::string sample_id;
  int sign_code = 0;
  int subject_id = 0;
  int repetition = 0;
  std::string feature_path;
};

struct Sample {
  SampleRecord record;
  Eigen::MatrixXd features;  // dims x length
};

struct BankEntry {
  int sign_code;
  Hmm model;
};

// One trained model per sign, kept sorted by ascending sign code.
struct ModelBank {
  std::vector<BankEntry> entries;

  Eigen::Index dim() const;
  const Hmm* find(int sign_code) const;
};

struct Classification {
  int sign_code = 0;
  Eigen::VectorXd logliks;  // aligned with bank entries
};

struct EvalReport {
  std::vector<int> sign_codes;          // ascending
  Eigen::MatrixXi confusion;            // rows true, columns predicted
  Eigen::VectorXd per_class_accuracy;   // percent; NaN for untested classes
  double accuracy = 0.0;                // percent
  std::string split_descriptor;
  std::uint64_t seed = 0;
};

// Index split over a source sample list.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

struct CurvePoint {
  double fraction = 0.0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
};

struct ProtocolResult {
  std::string name;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  std::vector<double> run_accuracies;
};

struct ProtocolSuiteConfig {
  double train_fraction = 0.2;
  int per_subject = 1;
  int train_subjects = 2;
  int runs = 10;
  TrainConfig train;
};

// Per class, ceil(train_fraction * class size) samples go to train.
Split split_random(std::span<const Sample> samples, double train_fraction,
                   std::uint64_t seed);
// Per (class, subject) pair, exactly per_subject samples go to train.
Split split_subject_dependent(std::span<const Sample> samples, int per_subject,
                              std::uint64_t seed);
// Whole subjects go to train; their ids never appear in test.
Split split_subject_independent(std::span<const Sample> samples,
                                int train_subjects, std::uint64_t seed);

std::vector<Sample> gather(std::span<const Sample> samples,
                           std::span<const std::size_t> indices);

// One Baum-Welch run per distinct sign code, each seeded from
// (config.seed, sign_code) so bank contents don't depend on sample order
// or thread count.
ModelBank train_bank(std::span<const Sample> train, const TrainConfig& config,
                     int threads = 1);

// Argmax of forward_log over the bank; ties go to the lowest sign code.
Classification classify(const ModelBank& bank,
                        const Eigen::Ref<const Eigen::MatrixXd>& obs);

EvalReport evaluate(const ModelBank& bank, std::span<const Sample> test,
                    int threads = 1);

// Nearest neighbor on flattened feature matrices; plumbing baseline.
EvalReport baseline_1nn(std::span<const Sample> train,
                        std::span<const Sample> test);

// Run r of any repeated experiment uses seed config.seed + r for both the
// split and the training run.
std::vector<CurvePoint> learning_curve(std::span<const Sample> samples,
                                       std::span<const double> fractions,
                                       int repeats, const TrainConfig& config,
                                       int threads = 1);

// The three evaluation protocols (random, subject-dependent,
// subject-independent), each repeated config.runs times.
std::vector<ProtocolResult> run_protocol_suite(std::span<const Sample> samples,
                                               const ProtocolSuiteConfig& config,
                                               int threads = 1);

// Bank file: 'trajsign-model v1' header, then each model keyed by sign code.
void save_bank(std::ostream& out, const ModelBank& bank);
ModelBank load_bank(std::istream& in);
void save_bank_file(const std::filesystem::path& path, const ModelBank& bank);
ModelBank load_bank_file(const std::filesystem::path& path);

// Manifest CSV: header sample_id,sign_code,subject_id,repetition,feature_path.
// '#' lines are comments (provenance goes there). Relative feature paths
// resolve against the manifest's directory.
void save_manifest_csv(const std::filesystem::path& path,
                       std::span<const SampleRecord> records,
                       std::span<const std::string> comments = {});
std::vector<SampleRecord> load_manifest_csv(const std::filesystem::path& path);
std::vector<Sample> load_samples(const std::filesystem::path& manifest_path);

void write_report_csv(std::ostream& out, const EvalReport& report);
void write_confusion_csv(std::ostream& out, const EvalReport& report);
std::string format_report(const EvalReport& report);

// Table-style text summary of the protocol suite; the last line reports the
// arithmetic mean of the per-protocol mean accuracies.
std::string format_protocol_summary(std::span<const ProtocolResult> results);
void write_protocol_csv(std::ostream& out,
                        std::span<const ProtocolResult> results);

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve);
std::string format_curve(std::span<const CurvePoint> curve);

}  // namespace trajsign
