#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <span>
#include <string>

#include "trajsign/errors.hpp"
#include "trajsign/image.hpp"

namespace trajsign {

inline constexpr Eigen::Index kFeatureLength = 30;

enum class FeatureSet { kTrajectory, kTrajectoryShape };

inline Eigen::Index feature_dims(FeatureSet set) {
  return set == FeatureSet::kTrajectory ? 2 : 5;
}

// Row order of a feature matrix: x, y, area, orientation, eccentricity.
// Trajectory-only matrices keep the first two rows.
Eigen::MatrixXd assemble(std::span<const RegionStats> stats, int frame_width,
                         int frame_height, FeatureSet set);

// Piecewise-linear resampling of every row at target_len equally spaced
// query points over the source index range. Endpoints are preserved exactly,
// and a source already at target_len passes through unchanged.
template <typename Derived>
Eigen::MatrixXd interpolate(const Eigen::MatrixBase<Derived>& seq,
                            Eigen::Index target_len = kFeatureLength) {
  if (seq.cols() < 2) {
    throw TooShort("interpolation needs at least 2 time steps");
  }
  if (target_len < 2) {
    throw std::invalid_argument("interpolation target length must be >= 2");
  }
  const Eigen::MatrixXd src = seq;
  const Eigen::Index last = src.cols() - 1;
  Eigen::MatrixXd out(src.rows(), target_len);
  for (Eigen::Index k = 0; k < target_len; ++k) {
    const double t =
        static_cast<double>(k) * static_cast<double>(last) /
        static_cast<double>(target_len - 1);
    Eigen::Index i0 = static_cast<Eigen::Index>(std::floor(t));
    double frac = t - static_cast<double>(i0);
    if (i0 >= last) {
      i0 = last - 1;
      frac = 1.0;
    }
    out.col(k) = (1.0 - frac) * src.col(i0) + frac * src.col(i0 + 1);
  }
  return out;
}

// Feature file: '# trajsign-features v1 ...' header, one CSV row per feature
// dimension. Values are written with 17 significant digits and round-trip
// bit-exactly.
void save_features_csv(const std::filesystem::path& path,
                       const Eigen::Ref<const Eigen::MatrixXd>& features);
Eigen::MatrixXd load_features_csv(const std::filesystem::path& path);

}  // namespace trajsign
