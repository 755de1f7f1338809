#include "trajsign/features.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace trajsign {

namespace {

const char* feature_order(Eigen::Index dims) {
  return dims == 2 ? "x,y" : "x,y,area,orientation,eccentricity";
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Eigen::MatrixXd assemble(std::span<const RegionStats> stats, int frame_width,
                         int frame_height, FeatureSet set) {
  if (stats.empty()) throw EmptyTrajectory("assemble on empty trajectory");
  if (frame_width < 1 || frame_height < 1) {
    throw std::invalid_argument("frame dimensions must be positive");
  }
  const Eigen::Index dims = feature_dims(set);
  const Eigen::Index len = static_cast<Eigen::Index>(stats.size());
  const double wh = static_cast<double>(frame_width) * frame_height;
  Eigen::MatrixXd out(dims, len);
  for (Eigen::Index t = 0; t < len; ++t) {
    const RegionStats& s = stats[static_cast<std::size_t>(t)];
    out(0, t) = s.centroid_x / frame_width;
    out(1, t) = s.centroid_y / frame_height;
    if (dims == 5) {
      out(2, t) = static_cast<double>(s.area) / wh;
      out(3, t) = s.orientation;
      out(4, t) = s.eccentricity;
    }
  }
  return out;
}

void save_features_csv(const std::filesystem::path& path,
                       const Eigen::Ref<const Eigen::MatrixXd>& features) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# trajsign-features v1 dims=" << features.rows()
      << " length=" << features.cols()
      << " order=" << feature_order(features.rows()) << "\n";
  for (Eigen::Index r = 0; r < features.rows(); ++r) {
    for (Eigen::Index c = 0; c < features.cols(); ++c) {
      if (c > 0) out << ",";
      out << format_double(features(r, c));
    }
    out << "\n";
  }
  if (!out) throw IoError("failed writing " + path.string());
}

Eigen::MatrixXd load_features_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  if (header.rfind("# trajsign-features v1", 0) != 0) {
    throw IoError("missing feature header in " + path.string());
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      row.push_back(std::stod(cell));
    }
    if (!rows.empty() && row.size() != rows[0].size()) {
      throw IoError("ragged feature rows in " + path.string());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("no feature rows in " + path.string());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows[0].size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
  }
  return m;
}

}  // namespace trajsign
