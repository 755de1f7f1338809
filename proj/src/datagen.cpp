#include "trajsign/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "trajsign/errors.hpp"
#include "trajsign/features.hpp"
#include "trajsign/pnm.hpp"
#include "trajsign/rng.hpp"

namespace trajsign {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Shape-channel synthesis constants.
constexpr double kAreaBase = 0.006;
constexpr double kAreaStep = 0.0008;
constexpr double kAreaModulation = 0.25;
constexpr double kEccLow = 0.35;
constexpr double kEccSpan = 0.6;

// Frame rendering intensities.
constexpr std::uint8_t kBackground = 25;
constexpr std::uint8_t kBlob = 230;

// Distinct RNG stream families under one corpus seed.
constexpr std::uint64_t kSubjectStream = 0x8000000000000000ull;

Eigen::Vector2d polyline_point(std::span<const Eigen::Vector2d> points,
                               double t) {
  const auto segments = static_cast<double>(points.size() - 1);
  const double s = std::clamp(t, 0.0, 1.0) * segments;
  auto seg = static_cast<std::size_t>(s);
  if (seg >= points.size() - 1) seg = points.size() - 2;
  const double u = s - static_cast<double>(seg);
  return (1.0 - u) * points[seg] + u * points[seg + 1];
}

Eigen::Vector2d arc_point(double theta0, double theta1, double t) {
  const double theta = theta0 + (theta1 - theta0) * t;
  return {0.5 + 0.34 * std::cos(theta), 0.5 + 0.34 * std::sin(theta)};
}

Eigen::Vector2d loop_point(double rx, double ry, double direction, double t) {
  const double theta = direction * kTwoPi * t;
  return {0.5 + rx * std::cos(theta), 0.5 + ry * std::sin(theta)};
}

Eigen::Vector2d lissajous_point(double a, double b, double phase, double t) {
  return {0.5 + 0.3 * std::sin(kTwoPi * a * t + phase),
          0.5 + 0.3 * std::sin(kTwoPi * b * t)};
}

Eigen::Vector2d proto_point(int sign_code, double t) {
  const int family = (sign_code - 1) / 4;
  const int variant = (sign_code - 1) % 4;
  switch (family) {
    case 0: {
      static const Eigen::Vector2d kLines[4][2] = {
          {{0.15, 0.15}, {0.85, 0.85}},
          {{0.15, 0.85}, {0.85, 0.15}},
          {{0.15, 0.50}, {0.85, 0.50}},
          {{0.50, 0.15}, {0.50, 0.85}},
      };
      return polyline_point({kLines[variant], 2}, t);
    }
    case 1: {
      static const double kSpans[4][2] = {
          {kPi, 0.0}, {kPi, kTwoPi}, {0.5 * kPi, -0.5 * kPi},
          {0.5 * kPi, 1.5 * kPi}};
      return arc_point(kSpans[variant][0], kSpans[variant][1], t);
    }
    case 2: {
      static const double kLoops[4][3] = {{0.30, 0.18, 1.0},
                                          {0.18, 0.30, 1.0},
                                          {0.30, 0.18, -1.0},
                                          {0.24, 0.24, 1.0}};
      return loop_point(kLoops[variant][0], kLoops[variant][1],
                        kLoops[variant][2], t);
    }
    case 3: {
      static const std::vector<Eigen::Vector2d> kZigzags[4] = {
          {{0.15, 0.15}, {0.15, 0.85}, {0.85, 0.15}, {0.85, 0.85}},
          {{0.15, 0.85}, {0.85, 0.85}, {0.15, 0.15}, {0.85, 0.15}},
          {{0.15, 0.85}, {0.50, 0.15}, {0.85, 0.85}},
          {{0.15, 0.15},
           {0.325, 0.85},
           {0.50, 0.30},
           {0.675, 0.85},
           {0.85, 0.15}}};
      return polyline_point(kZigzags[variant], t);
    }
    default: {
      static const double kLissajous[4][3] = {{1.0, 2.0, 0.5 * kPi},
                                              {2.0, 1.0, 0.5 * kPi},
                                              {1.0, 2.0, 0.0},
                                              {2.0, 3.0, 0.5 * kPi}};
      return lissajous_point(kLissajous[variant][0], kLissajous[variant][1],
                             kLissajous[variant][2], t);
    }
  }
}

struct SubjectTransform {
  double scale = 1.0;
  double dx = 0.0;
  double dy = 0.0;
};

std::vector<SubjectTransform> subject_transforms(const GenSpec& spec) {
  std::vector<SubjectTransform> out(
      static_cast<std::size_t>(spec.num_subjects) + 1);
  for (int u = 1; u <= spec.num_subjects; ++u) {
    Rng rng(derive_seed(spec.seed,
                        kSubjectStream + static_cast<std::uint64_t>(u)));
    auto& t = out[static_cast<std::size_t>(u)];
    t.scale = rng.uniform(spec.subject_scale_min, spec.subject_scale_max);
    t.dx = rng.normal() * spec.subject_offset_sigma;
    t.dy = rng.normal() * spec.subject_offset_sigma;
  }
  return out;
}

// Monotone piecewise-linear parameter warp through knots at 1/4, 1/2, 3/4.
struct TimeWarp {
  double y[3];

  double operator()(double t) const {
    static constexpr double kx[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
    const double ky[5] = {0.0, y[0], y[1], y[2], 1.0};
    int seg = static_cast<int>(t * 4.0);
    seg = std::clamp(seg, 0, 3);
    const double u = (t - kx[seg]) / 0.25;
    return ky[seg] + (ky[seg + 1] - ky[seg]) * u;
  }
};

// Blend of the identity map and sorted uniform knots; strength 0 keeps every
// repetition at nominal speed, 1 allows a quarter to collapse to a near-still
// frame run. Knots are always drawn so the stream layout is strength-free.
TimeWarp draw_warp(Rng& rng, double strength) {
  double raw[3] = {rng.uniform01(), rng.uniform01(), rng.uniform01()};
  std::sort(raw, raw + 3);
  TimeWarp warp{};
  for (int i = 0; i < 3; ++i) {
    const double even = 0.25 * static_cast<double>(i + 1);
    warp.y[i] = (1.0 - strength) * even + strength * raw[i];
  }
  return warp;
}

double fold_axis_angle(double angle) {
  while (angle > 0.5 * kPi) angle -= kPi;
  while (angle <= -0.5 * kPi) angle += kPi;
  return angle;
}

std::string sample_name(int sign_code, int subject, int rep) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "s%02d_p%02d_r%02d", sign_code, subject,
                rep);
  return buf;
}

Sample make_sample(const GenSpec& spec, const SubjectTransform& subject,
                   int sign_code, int subject_id, int rep) {
  const std::uint64_t stream =
      (static_cast<std::uint64_t>(sign_code) * 1000000ull) +
      (static_cast<std::uint64_t>(subject_id) * 1000ull) +
      static_cast<std::uint64_t>(rep);
  Rng rng(derive_seed(spec.seed, stream));

  const int frames = spec.min_frames == spec.max_frames
                         ? spec.min_frames
                         : rng.uniform_int(spec.min_frames, spec.max_frames);
  const TimeWarp warp = draw_warp(rng, spec.warp_strength);

  Eigen::MatrixXd clean(2, frames);
  Eigen::VectorXd tau(frames);
  for (int i = 0; i < frames; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(frames - 1);
    tau(i) = warp(t);
    const Eigen::Vector2d p = proto_point(sign_code, tau(i));
    clean(0, i) = 0.5 + subject.scale * (p.x() - 0.5) + subject.dx;
    clean(1, i) = 0.5 + subject.scale * (p.y() - 0.5) + subject.dy;
  }

  // Per-frame velocity from the clean track: tangent feeds the orientation
  // channel, magnitude feeds the eccentricity channel.
  Eigen::MatrixXd velocity(2, frames);
  for (int i = 0; i < frames; ++i) {
    const int lo = std::max(i - 1, 0);
    const int hi = std::min(i + 1, frames - 1);
    velocity.col(i) = (clean.col(hi) - clean.col(lo)) /
                      static_cast<double>(hi - lo);
  }
  double max_speed = 0.0;
  for (int i = 0; i < frames; ++i) {
    max_speed = std::max(max_speed, velocity.col(i).norm());
  }
  if (max_speed <= 0.0) max_speed = 1.0;

  const int class_index = sign_code - 1;
  const double area_base =
      (kAreaBase + kAreaStep * class_index) * subject.scale;
  const double area_phase =
      kTwoPi * class_index / static_cast<double>(kMaxPrototypeClasses);

  Eigen::MatrixXd features(5, frames);
  for (int i = 0; i < frames; ++i) {
    features(0, i) = clean(0, i) + rng.normal() * spec.noise_sigma;
    features(1, i) = clean(1, i) + rng.normal() * spec.noise_sigma;

    double area =
        area_base * (1.0 + kAreaModulation * std::sin(kTwoPi * tau(i) +
                                                      area_phase));
    area += rng.normal() * spec.noise_sigma * kAreaBase;
    features(2, i) = std::max(area, 1e-6);

    double orient = fold_axis_angle(
        std::atan2(velocity(1, i), velocity(0, i)));
    orient += rng.normal() * spec.noise_sigma * 5.0;
    features(3, i) = fold_axis_angle(orient);

    double ecc = kEccLow + kEccSpan * (velocity.col(i).norm() / max_speed);
    ecc += rng.normal() * spec.noise_sigma;
    features(4, i) = std::clamp(ecc, 0.01, 0.999);
  }

  Sample sample;
  sample.record.sample_id = sample_name(sign_code, subject_id, rep);
  sample.record.sign_code = sign_code;
  sample.record.subject_id = subject_id;
  sample.record.repetition = rep;
  sample.features = interpolate(features);
  return sample;
}

void validate_spec(const GenSpec& spec) {
  if (spec.num_classes < 1 || spec.num_subjects < 1 ||
      spec.reps_per_subject < 1) {
    throw std::invalid_argument("corpus counts must be >= 1");
  }
  if (spec.num_classes > kMaxPrototypeClasses) {
    throw std::invalid_argument("prototype table covers at most 20 classes");
  }
  if (spec.min_frames < 2 || spec.max_frames < spec.min_frames) {
    throw std::invalid_argument("frame range must satisfy 2 <= min <= max");
  }
  if (spec.noise_sigma < 0.0) {
    throw std::invalid_argument("noise_sigma must be >= 0");
  }
  if (!(spec.subject_scale_min > 0.0) ||
      spec.subject_scale_max < spec.subject_scale_min ||
      spec.subject_scale_max > 2.0) {
    throw std::invalid_argument("subject scale range must lie in (0, 2]");
  }
  if (spec.warp_strength < 0.0 || spec.warp_strength > 1.0) {
    throw std::invalid_argument("warp_strength must lie in [0, 1]");
  }
}

}  // namespace

Eigen::MatrixXd prototype_curve(int sign_code, Eigen::Index num_points) {
  if (sign_code < 1 || sign_code > kMaxPrototypeClasses) {
    throw std::invalid_argument("sign_code outside the prototype table");
  }
  if (num_points < 2) {
    throw std::invalid_argument("prototype needs at least 2 points");
  }
  Eigen::MatrixXd curve(2, num_points);
  for (Eigen::Index i = 0; i < num_points; ++i) {
    const double t =
        static_cast<double>(i) / static_cast<double>(num_points - 1);
    curve.col(i) = proto_point(sign_code, t);
  }
  return curve;
}

std::vector<Sample> generate_samples(const GenSpec& spec) {
  validate_spec(spec);
  const auto subjects = subject_transforms(spec);
  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(spec.num_classes) *
                  static_cast<std::size_t>(spec.num_subjects) *
                  static_cast<std::size_t>(spec.reps_per_subject));
  for (int k = 1; k <= spec.num_classes; ++k) {
    for (int u = 1; u <= spec.num_subjects; ++u) {
      for (int r = 1; r <= spec.reps_per_subject; ++r) {
        samples.push_back(
            make_sample(spec, subjects[static_cast<std::size_t>(u)], k, u, r));
      }
    }
  }
  return samples;
}

std::vector<SampleRecord> generate_dataset(
    const GenSpec& spec, const std::filesystem::path& out_dir,
    std::span<const std::string> manifest_comments) {
  auto samples = generate_samples(spec);
  const auto feature_dir = out_dir / "features";
  std::error_code ec;
  std::filesystem::create_directories(feature_dir, ec);
  if (ec) throw IoError("cannot create " + feature_dir.string());

  std::vector<SampleRecord> records;
  records.reserve(samples.size());
  for (auto& sample : samples) {
    sample.record.feature_path = "features/" + sample.record.sample_id + ".csv";
    save_features_csv(out_dir / sample.record.feature_path, sample.features);
    records.push_back(sample.record);
  }
  save_manifest_csv(out_dir / "manifest.csv", records, manifest_comments);
  return records;
}

void generate_frame_sequence(const Eigen::Ref<const Eigen::MatrixXd>& curve,
                             int width, int height, int radius,
                             const std::filesystem::path& out_dir) {
  if (curve.rows() != 2 || curve.cols() < 1) {
    throw std::invalid_argument("curve must be 2 x T with T >= 1");
  }
  if (radius < 1 || width < 2 * radius + 2 || height < 2 * radius + 2) {
    throw std::invalid_argument("frame too small for the blob radius");
  }

  std::vector<std::pair<int, int>> centers;
  centers.reserve(static_cast<std::size_t>(curve.cols()));
  for (Eigen::Index t = 0; t < curve.cols(); ++t) {
    const auto cx = static_cast<int>(std::lround(curve(0, t) * (width - 1)));
    const auto cy = static_cast<int>(std::lround(curve(1, t) * (height - 1)));
    if (cx - radius < 0 || cx + radius >= width || cy - radius < 0 ||
        cy + radius >= height) {
      throw CurveOutOfBounds("blob leaves the frame at column " +
                             std::to_string(t));
    }
    centers.emplace_back(cx, cy);
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string());

  int index = 0;
  char name[32];
  const Frame background = make_frame(width, height, kBackground);
  for (int i = 0; i < kLeadInFrames; ++i) {
    std::snprintf(name, sizeof(name), "frame_%04d.pgm", ++index);
    write_pgm(out_dir / name, background);
  }
  const long r2 = static_cast<long>(radius) * radius;
  for (const auto& [cx, cy] : centers) {
    Frame frame = background;
    for (int dy = -radius; dy <= radius; ++dy) {
      for (int dx = -radius; dx <= radius; ++dx) {
        if (static_cast<long>(dx) * dx + static_cast<long>(dy) * dy <= r2) {
          frame.at(cx + dx, cy + dy) = kBlob;
        }
      }
    }
    std::snprintf(name, sizeof(name), "frame_%04d.pgm", ++index);
    write_pgm(out_dir / name, frame);
  }
}

}  // namespace trajsign
