#include "trajsign/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>

#include "trajsign/errors.hpp"

namespace trajsign {

namespace {

void require_same_dims(std::span<const Frame> frames) {
  for (const Frame& f : frames) {
    if (f.width != frames[0].width || f.height != frames[0].height) {
      throw DimensionMismatch("frames differ in size");
    }
  }
}

RegionMask diff_mask(const Frame& a, const Frame& b, int threshold) {
  RegionMask mask{a.width, a.height,
                  std::vector<std::uint8_t>(a.pixels.size(), 0)};
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const int d = std::abs(int(a.pixels[i]) - int(b.pixels[i]));
    mask.member[i] = d > threshold ? 1 : 0;
  }
  return mask;
}

struct Centroid {
  double x = 0.0;
  double y = 0.0;
};

std::optional<Centroid> mask_centroid(const RegionMask& mask) {
  double sx = 0.0, sy = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (mask.at(x, y)) {
        sx += x;
        sy += y;
        ++n;
      }
    }
  }
  if (n == 0) return std::nullopt;
  return Centroid{sx / double(n), sy / double(n)};
}

bool passes_floor(const Frame& frame, int x, int y, int floor) {
  return floor <= 0 || frame.at(x, y) >= floor;
}

// Seed for the next region growing: the rounded centroid when it passes the
// glove predicate in `frame`, otherwise the member pixel of `mask` nearest to
// the centroid that does. Row-major order breaks distance ties.
std::optional<std::pair<int, int>> pick_seed(const Centroid& c,
                                             const RegionMask& mask,
                                             const Frame& frame,
                                             int glove_floor) {
  const int rx = int(std::lround(c.x));
  const int ry = int(std::lround(c.y));
  if (frame.in_bounds(rx, ry) && passes_floor(frame, rx, ry, glove_floor)) {
    return std::make_pair(rx, ry);
  }
  double best = std::numeric_limits<double>::infinity();
  std::optional<std::pair<int, int>> pick;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y) || !passes_floor(frame, x, y, glove_floor)) continue;
      const double dx = x - c.x, dy = y - c.y;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best) {
        best = d2;
        pick = std::make_pair(x, y);
      }
    }
  }
  return pick;
}

}  // namespace

Frame make_frame(int width, int height, std::uint8_t fill) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("frame dimensions must be positive");
  }
  return Frame{width, height,
               std::vector<std::uint8_t>(
                   static_cast<std::size_t>(width) * height, fill)};
}

std::size_t RegionMask::count() const {
  return static_cast<std::size_t>(
      std::count(member.begin(), member.end(), std::uint8_t{1}));
}

std::size_t detect_start_frame(std::span<const Frame> frames,
                               int diff_threshold,
                               std::size_t area_threshold) {
  if (frames.size() < 2) {
    throw std::invalid_argument("detect_start_frame needs at least 2 frames");
  }
  require_same_dims(frames);
  for (std::size_t i = 1; i < frames.size(); ++i) {
    std::size_t changed = 0;
    const Frame& f = frames[i];
    const Frame& first = frames[0];
    for (std::size_t p = 0; p < f.pixels.size(); ++p) {
      if (std::abs(int(f.pixels[p]) - int(first.pixels[p])) > diff_threshold) {
        ++changed;
      }
    }
    if (changed > area_threshold) return i;
  }
  throw NoHandDetected("no frame differs from frame 0 by more than threshold");
}

RegionMask region_grow(const Frame& frame, int seed_x, int seed_y,
                       int tolerance, int glove_floor) {
  if (!frame.in_bounds(seed_x, seed_y)) {
    throw SeedOutOfBounds("seed outside frame");
  }
  if (!passes_floor(frame, seed_x, seed_y, glove_floor)) {
    throw SeedMismatch("seed pixel below glove brightness floor");
  }
  const int ref = frame.at(seed_x, seed_y);
  RegionMask mask{frame.width, frame.height,
                  std::vector<std::uint8_t>(frame.pixels.size(), 0)};
  std::vector<std::pair<int, int>> stack;
  stack.emplace_back(seed_x, seed_y);
  mask.member[static_cast<std::size_t>(seed_y) * frame.width + seed_x] = 1;
  while (!stack.empty()) {
    const auto [x, y] = stack.back();
    stack.pop_back();
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const int nx = x + dx, ny = y + dy;
        if (!frame.in_bounds(nx, ny)) continue;
        const std::size_t idx =
            static_cast<std::size_t>(ny) * frame.width + nx;
        if (mask.member[idx]) continue;
        if (std::abs(int(frame.pixels[idx]) - ref) <= tolerance) {
          mask.member[idx] = 1;
          stack.emplace_back(nx, ny);
        }
      }
    }
  }
  return mask;
}

RegionStats region_stats(const RegionMask& mask) {
  double sx = 0.0, sy = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (mask.at(x, y)) {
        sx += x;
        sy += y;
        ++n;
      }
    }
  }
  if (n == 0) throw EmptyRegion("region_stats on empty mask");
  const double cx = sx / double(n);
  const double cy = sy / double(n);

  double m20 = 0.0, m02 = 0.0, m11 = 0.0;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      const double dx = x - cx, dy = y - cy;
      m20 += dx * dx;
      m02 += dy * dy;
      m11 += dx * dy;
    }
  }
  // Normalized central moments with the 1/12 variance of a unit pixel added
  // to the diagonal, keeping the minor axis positive for degenerate shapes.
  const double mu20 = m20 / double(n) + 1.0 / 12.0;
  const double mu02 = m02 / double(n) + 1.0 / 12.0;
  const double mu11 = m11 / double(n);

  const double common =
      std::sqrt((mu20 - mu02) * (mu20 - mu02) + 4.0 * mu11 * mu11);
  const double lam_max = 0.5 * (mu20 + mu02 + common);
  const double lam_min = 0.5 * (mu20 + mu02 - common);

  RegionStats stats;
  stats.centroid_x = cx;
  stats.centroid_y = cy;
  stats.area = n;
  stats.orientation = 0.5 * std::atan2(2.0 * mu11, mu20 - mu02);
  stats.eccentricity = std::sqrt(std::max(0.0, 1.0 - lam_min / lam_max));
  return stats;
}

std::vector<RegionStats> track_hand(std::span<const Frame> frames,
                                    std::size_t start_index,
                                    const TrackOptions& options) {
  if (start_index >= frames.size()) {
    throw std::invalid_argument("start_index out of range");
  }
  require_same_dims(frames);

  const RegionMask start_diff =
      diff_mask(frames[start_index], frames[0], options.diff_threshold);
  const auto start_centroid = mask_centroid(start_diff);
  if (!start_centroid) {
    throw NoHandDetected("start frame shows no difference region");
  }

  std::vector<RegionStats> stats;
  stats.reserve(frames.size() - start_index);

  Centroid centroid = *start_centroid;
  RegionMask prev_mask = start_diff;
  bool have_region = false;
  int gap = 0;

  for (std::size_t n = start_index; n < frames.size(); ++n) {
    const Frame& frame = frames[n];
    const auto seed = pick_seed(centroid, prev_mask, frame, options.glove_floor);
    if (seed) {
      const RegionMask region = region_grow(
          frame, seed->first, seed->second, options.tolerance,
          options.glove_floor);
      const RegionStats s = region_stats(region);
      stats.push_back(s);
      centroid = Centroid{s.centroid_x, s.centroid_y};
      prev_mask = region;
      have_region = true;
      gap = 0;
    } else {
      ++gap;
      if (gap > options.max_gap || !have_region) {
        throw TrackingLost("seed predicate failed beyond max_gap");
      }
      stats.push_back(stats.back());
    }
  }
  return stats;
}

}  // namespace trajsign
