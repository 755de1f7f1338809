#pragma once

#include <filesystem>
#include <vector>

#include "trajsign/image.hpp"

namespace trajsign {

// Reads a binary P5 PGM or P6 PPM (8-bit). Color maps to grayscale luma.
Frame read_pnm(const std::filesystem::path& path);

void write_pgm(const std::filesystem::path& path, const Frame& frame);

// A video is a directory of frame_NNNN.pgm / .ppm files, lexical order.
std::vector<Frame> read_frame_directory(const std::filesystem::path& dir);

}  // namespace trajsign
