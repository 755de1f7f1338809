#include "trajsign/pnm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>

#include "trajsign/errors.hpp"

namespace trajsign {

namespace {

// Next integer token, skipping whitespace and '#' comment lines.
int read_header_int(std::istream& in, const std::filesystem::path& path) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  if (c == EOF || !std::isdigit(c)) {
    throw IoError("malformed PNM header: " + path.string());
  }
  int value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    c = in.get();
  }
  return value;
}

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  return static_cast<std::uint8_t>(std::lround(std::clamp(y, 0.0, 255.0)));
}

}  // namespace

Frame read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());

  char magic[2] = {0, 0};
  in.read(magic, 2);
  const bool color = magic[0] == 'P' && magic[1] == '6';
  const bool gray = magic[0] == 'P' && magic[1] == '5';
  if (!color && !gray) {
    throw IoError("unsupported PNM magic in " + path.string());
  }

  const int width = read_header_int(in, path);
  const int height = read_header_int(in, path);
  const int maxval = read_header_int(in, path);
  if (width < 1 || height < 1) {
    throw IoError("bad PNM dimensions in " + path.string());
  }
  if (maxval < 1 || maxval > 255) {
    throw IoError("only 8-bit PNM supported: " + path.string());
  }
  // read_header_int consumed the single whitespace after maxval already.

  const std::size_t count = static_cast<std::size_t>(width) * height;
  Frame frame = make_frame(width, height);
  if (gray) {
    in.read(reinterpret_cast<char*>(frame.pixels.data()),
            static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count) {
      throw IoError("truncated PGM data: " + path.string());
    }
  } else {
    std::vector<std::uint8_t> rgb(count * 3);
    in.read(reinterpret_cast<char*>(rgb.data()),
            static_cast<std::streamsize>(rgb.size()));
    if (static_cast<std::size_t>(in.gcount()) != rgb.size()) {
      throw IoError("truncated PPM data: " + path.string());
    }
    for (std::size_t i = 0; i < count; ++i) {
      frame.pixels[i] = luma(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]);
    }
  }
  return frame;
}

void write_pgm(const std::filesystem::path& path, const Frame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.pixels.data()),
            static_cast<std::streamsize>(frame.pixels.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<Frame> read_frame_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw IoError("not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    const std::string ext = entry.path().extension().string();
    if (name.rfind("frame_", 0) == 0 && (ext == ".pgm" || ext == ".ppm")) {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) throw IoError("no frame_*.pgm/.ppm in " + dir.string());
  std::sort(files.begin(), files.end());
  std::vector<Frame> frames;
  frames.reserve(files.size());
  for (const auto& f : files) frames.push_back(read_pnm(f));
  return frames;
}

}  // namespace trajsign
