#include "tss/io/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <vector>

#include "tss/io/npy.hpp"

namespace tss::io {

namespace {

bool has_png_signature(const std::string& bytes) {
  return bytes.size() >= 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) == 0;
}

ImageRaster decode_png(const std::string& bytes, const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw IoError(path.string() + ": " + image.message);
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IoError(path.string() + ": " + msg);
  }
  ImageRaster out;
  out.width = static_cast<int>(image.width);
  out.height = static_cast<int>(image.height);
  out.channels = color ? 3 : 1;
  out.pixels.resize(buffer.size());
  std::transform(buffer.begin(), buffer.end(), out.pixels.begin(),
                 [](png_byte b) { return b / 255.0; });
  return out;
}

// Netpbm P2/P3/P5/P6.
ImageRaster decode_pnm(const std::string& bytes, const std::filesystem::path& path) {
  std::size_t pos = 2;
  auto next_token = [&]() -> long {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (start == pos) throw IoError(path.string() + ": malformed netpbm header");
    return std::stol(bytes.substr(start, pos - start));
  };

  const char kind = bytes[1];
  const bool color = kind == '3' || kind == '6';
  const bool binary = kind == '5' || kind == '6';
  ImageRaster out;
  out.width = static_cast<int>(next_token());
  out.height = static_cast<int>(next_token());
  const long maxval = next_token();
  if (out.width <= 0 || out.height <= 0 || maxval <= 0 || maxval > 65535) {
    throw IoError(path.string() + ": invalid netpbm dimensions");
  }
  out.channels = color ? 3 : 1;
  const std::size_t count = static_cast<std::size_t>(out.width) * out.height * out.channels;
  out.pixels.resize(count);
  if (binary) {
    ++pos;  // single whitespace after maxval
    const std::size_t width = maxval < 256 ? 1 : 2;
    if (bytes.size() < pos + count * width) throw IoError(path.string() + ": truncated netpbm data");
    for (std::size_t i = 0; i < count; ++i) {
      unsigned v = static_cast<unsigned char>(bytes[pos + i * width]);
      if (width == 2) v = (v << 8) | static_cast<unsigned char>(bytes[pos + i * width + 1]);
      out.pixels[i] = std::min(1.0, static_cast<double>(v) / maxval);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      out.pixels[i] = std::min(1.0, static_cast<double>(next_token()) / maxval);
    }
  }
  return out;
}

std::vector<unsigned char> to_bytes(const Raster& raster) {
  std::vector<unsigned char> out(raster.size());
  std::transform(raster.values.begin(), raster.values.end(), out.begin(), [](double v) {
    const double c = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
    return static_cast<unsigned char>(std::lround(c * 255.0));
  });
  return out;
}

}  // namespace

ImageRaster read_image(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (has_png_signature(bytes)) return decode_png(bytes, path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && std::strchr("2356", bytes[1]) != nullptr) {
    return decode_pnm(bytes, path);
  }
  throw IoError(path.string() + ": unrecognized image format (expected PNG, PGM or PPM)");
}

void write_png_gray(const std::filesystem::path& path, const Raster& raster) {
  if (raster.empty()) throw std::invalid_argument("cannot write an empty image");
  const auto bytes = to_bytes(raster);
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(raster.width);
  image.height = static_cast<png_uint_32>(raster.height);
  image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0, nullptr)) {
    throw IoError(path.string() + ": " + image.message);
  }
}

void write_pgm(const std::filesystem::path& path, const Raster& raster) {
  const auto bytes = to_bytes(raster);
  std::string out = "P5\n" + std::to_string(raster.width) + " " + std::to_string(raster.height) +
                    "\n255\n";
  out.append(bytes.begin(), bytes.end());
  write_file(path, out);
}

}  // namespace tss::io
