#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace trajsign {

// 8-bit grayscale frame, row-major. Color input is converted on ingest.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t& at(int x, int y) {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
};

Frame make_frame(int width, int height, std::uint8_t fill = 0);

struct RegionMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> member;  // 0/1 per pixel, row-major

  bool at(int x, int y) const {
    return member[static_cast<std::size_t>(y) * width + x] != 0;
  }
  std::size_t count() const;
};

// Per-frame hand descriptor. Orientation and eccentricity come from the
// second central moments of the region, read as an equivalent ellipse.
struct RegionStats {
  double centroid_x = 0.0;
  double centroid_y = 0.0;
  std::size_t area = 0;
  double orientation = 0.0;   // radians in [-pi/2, pi/2]
  double eccentricity = 0.0;  // [0, 1)
};

struct TrackOptions {
  int diff_threshold = 40;   // |frame - frame_0| intensity step
  int tolerance = 60;        // region-growing intensity tolerance
  int max_gap = 3;           // frames carried forward before TrackingLost
  int glove_floor = 180;     // minimum seed brightness; <= 0 disables
};

// Smallest index i >= 1 where more than area_threshold pixels differ from
// frame 0 by more than diff_threshold. Throws NoHandDetected if none does.
std::size_t detect_start_frame(std::span<const Frame> frames,
                               int diff_threshold,
                               std::size_t area_threshold);

// Maximal 8-connected component around the seed whose intensities stay within
// tolerance of the seed pixel. A positive glove_floor rejects seeds darker
// than the floor (SeedMismatch).
RegionMask region_grow(const Frame& frame, int seed_x, int seed_y,
                       int tolerance, int glove_floor = 0);

RegionStats region_stats(const RegionMask& mask);

// Seeded tracking from the start frame to the end of the sequence, one
// RegionStats per frame. Gaps up to max_gap carry the previous stats forward.
std::vector<RegionStats> track_hand(std::span<const Frame> frames,
                                    std::size_t start_index,
                                    const TrackOptions& options);

}  // namespace trajsign
