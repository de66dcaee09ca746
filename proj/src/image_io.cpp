#include "blockprox/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "blockprox/errors.hpp"

namespace blockprox {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_error_handler(png_structp png, png_const_charp msg) {
  // Recovered via the error string; longjmp would skip destructors.
  throw IoError(std::string("png: ") + msg +
                (png_get_error_ptr(png) != nullptr
                     ? " (" + *static_cast<std::string*>(png_get_error_ptr(png)) + ")"
                     : ""));
}

void png_warning_handler(png_structp, png_const_charp) {}

}  // namespace

ImageChannels load_png(const std::string& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open '" + path + "' for reading");

  std::string ctx = path;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &ctx, png_error_handler,
                                           png_warning_handler);
  if (png == nullptr) throw IoError("png: failed to allocate reader");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("png: failed to allocate info");
  }

  std::vector<png_byte> data;
  std::vector<png_bytep> rows;
  std::size_t width = 0, height = 0, channels = 0;
  try {
    png_init_io(png, file.get());
    png_read_info(png, info);

    width = png_get_image_width(png, info);
    height = png_get_image_height(png, info);
    const png_byte color = png_get_color_type(png, info);
    const png_byte depth = png_get_bit_depth(png, info);

    // Normalize everything to 8-bit gray or RGB.
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS) != 0) png_set_tRNS_to_alpha(png);
    if (depth == 16) png_set_strip_16(png);
    if ((color & PNG_COLOR_MASK_ALPHA) != 0) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    channels = png_get_channels(png, info);
    if (channels != 1 && channels != 3) {
      throw IoError("'" + path + "': unsupported channel layout after conversion");
    }

    const std::size_t stride = png_get_rowbytes(png, info);
    data.resize(stride * height);
    rows.resize(height);
    for (std::size_t y = 0; y < height; ++y) rows[y] = data.data() + y * stride;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
  png_destroy_read_struct(&png, &info, nullptr);

  ImageChannels out;
  out.width = width;
  out.height = height;
  out.max_pixel = 255.0;
  out.channels.assign(channels, Matrix(height, width));
  for (std::size_t y = 0; y < height; ++y) {
    const png_bytep row = rows[y];
    for (std::size_t x = 0; x < width; ++x) {
      for (std::size_t c = 0; c < channels; ++c) {
        out.channels[c].at(y, x) = static_cast<double>(row[x * channels + c]) / 255.0;
      }
    }
  }
  return out;
}

void write_png(const std::string& path, const ImageChannels& image) {
  const std::size_t channels = image.channels.size();
  if (channels != 1 && channels != 3) {
    throw UsageError("write_png: need 1 or 3 channels");
  }
  for (const Matrix& ch : image.channels) {
    if (ch.rows() != image.height || ch.cols() != image.width) {
      throw UsageError("write_png: channel dimensions disagree with the header");
    }
  }

  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("cannot open '" + path + "' for writing");

  std::string ctx = path;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &ctx, png_error_handler,
                                            png_warning_handler);
  if (png == nullptr) throw IoError("png: failed to allocate writer");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("png: failed to allocate info");
  }

  std::vector<png_byte> data(image.width * image.height * channels);
  for (std::size_t y = 0; y < image.height; ++y) {
    for (std::size_t x = 0; x < image.width; ++x) {
      for (std::size_t c = 0; c < channels; ++c) {
        const double v = std::clamp(image.channels[c].at(y, x), 0.0, 1.0);
        data[(y * image.width + x) * channels + c] =
            static_cast<png_byte>(std::lround(v * 255.0));
      }
    }
  }
  std::vector<png_bytep> rows(image.height);
  for (std::size_t y = 0; y < image.height; ++y) {
    rows[y] = data.data() + y * image.width * channels;
  }

  try {
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
                 static_cast<png_uint_32>(image.height), 8,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
  png_destroy_write_struct(&png, &info);
}

}  // namespace blockprox
