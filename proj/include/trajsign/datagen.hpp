#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "trajsign/classify.hpp"

namespace trajsign {

// Synthetic corpus shape. Defaults produce 20 x 12 x 5 = 1200 samples.
struct GenSpec {
  int num_classes = 20;
  int num_subjects = 12;
  int reps_per_subject = 5;
  int min_frames = 40;
  int max_frames = 80;
  double noise_sigma = 0.01;           // per-frame coordinate jitter
  double subject_offset_sigma = 0.025;  // per-subject translation
  double subject_scale_min = 0.95;     // per-subject isotropic scale
  double subject_scale_max = 1.05;
  double warp_strength = 0.35;         // per-repetition speed warp, [0, 1]
  std::uint64_t seed = 0;
};

// The prototype table covers this many classes; parameters are fixed
// constants so thresholds stay stable across machines.
inline constexpr int kMaxPrototypeClasses = 20;

// Hand-free frames written before the moving blob appears.
inline constexpr int kLeadInFrames = 12;

// Class prototype sampled at num_points parameter values in [0, 1].
// Rows are x, y in unit coordinates, kept inside [0.12, 0.88].
Eigen::MatrixXd prototype_curve(int sign_code, Eigen::Index num_points);

// In-memory corpus: every (class, subject, repetition) triple becomes one
// interpolated 5 x 30 feature matrix. Subject transforms are fixed per
// subject id; each sample gets its own speed warp and jitter stream, so
// outputs don't depend on generation order.
std::vector<Sample> generate_samples(const GenSpec& spec);

// Same corpus written to disk: feature CSVs under out_dir/features plus
// out_dir/manifest.csv (optionally prefixed with '#' comment lines).
std::vector<SampleRecord> generate_dataset(
    const GenSpec& spec, const std::filesystem::path& out_dir,
    std::span<const std::string> manifest_comments = {});

// PGM frame directory: kLeadInFrames dark frames, then one frame per curve
// column with a bright disk centered on the (unit-coordinate) curve point.
void generate_frame_sequence(const Eigen::Ref<const Eigen::MatrixXd>& curve,
                             int width, int height, int radius,
                             const std::filesystem::path& out_dir);

}  // namespace trajsign
