#ifndef BLOCKPROX_IMAGE_IO_HPP_
#define BLOCKPROX_IMAGE_IO_HPP_

#include <string>
#include <vector>

#include "blockprox/dense.hpp"

namespace blockprox {

/// Decoded image: one matrix per channel (3 for RGB, 1 for grayscale), pixel
/// (row, col) = (y, x), values scaled to [0, 1]. max_pixel records the scale
/// of the source data (255 for 8-bit input).
struct ImageChannels {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<Matrix> channels;
  double max_pixel = 255.0;
};

/// Reads an 8-bit RGB or grayscale PNG (palette and 16-bit inputs are
/// converted, alpha is stripped). Throws IoError for unreadable files.
ImageChannels load_png(const std::string& path);

/// Writes channels (values clamped to [0, 1]) as an 8-bit PNG; 1 channel
/// writes grayscale, 3 write RGB.
void write_png(const std::string& path, const ImageChannels& image);

}  // namespace blockprox

#endif  // BLOCKPROX_IMAGE_IO_HPP_
