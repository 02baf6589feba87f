#pragma once

#include <string>
#include <vector>

#include "texret/core.hpp"

namespace texret {

// Loads an 8-bit grayscale or RGB image (binary PGM "P5" or PNG).
// RGB is converted to luminance 0.299 R + 0.587 G + 0.114 B, rounded to
// the nearest integer. Throws Error{io} for unreadable files and
// Error{format} for unsupported formats or bit depths.
GrayImage load_image(const std::string& path);

// Writes a matrix as binary 8-bit PGM, rounding to nearest and clamping
// to [0, 255].
void write_pgm(const GrayImage& img, const std::string& path);

// Splits an image into non-overlapping tile_size x tile_size tiles in
// row-major grid order. tile_size must divide both dimensions.
std::vector<GrayImage> tile_image(const GrayImage& img, std::size_t tile_size);

}  // namespace texret
