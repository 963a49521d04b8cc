#include "tss/raster.hpp"

#include <cmath>
#include <stdexcept>

namespace tss {

Raster::Raster(int w, int h, double fill) : width(w), height(h) {
  if (w < 0 || h < 0) throw std::invalid_argument("negative raster dimension");
  values.assign(static_cast<std::size_t>(w) * h, fill);
}

Tensor3::Tensor3(int h, int w, int d, double fill) : height(h), width(w), depth(d) {
  if (h < 0 || w < 0 || d < 0) throw std::invalid_argument("negative tensor dimension");
  data.assign(static_cast<std::size_t>(h) * w * d, fill);
}

void ImageRaster::validate() const {
  if (width <= 0 || height <= 0) throw std::invalid_argument("image must be non-empty");
  if (channels != 1 && channels != 3) {
    throw std::invalid_argument("unsupported channel count " + std::to_string(channels));
  }
  if (pixels.size() != static_cast<std::size_t>(width) * height * channels) {
    throw std::invalid_argument("pixel count does not match W*H*channels");
  }
  for (double p : pixels) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw std::invalid_argument("image samples must be finite and in [0, 1]");
    }
  }
}

ImageRaster ImageRaster::from_raster(const Raster& gray) {
  return ImageRaster{gray.width, gray.height, 1, gray.values};
}

Raster ImageRaster::to_raster() const {
  if (channels != 1) throw std::invalid_argument("to_raster requires a grayscale image");
  Raster r;
  r.width = width;
  r.height = height;
  r.values = pixels;
  return r;
}

int mirror_index(int i, int n) {
  if (n <= 0) throw std::invalid_argument("mirror_index on empty axis");
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - m;
}

}  // namespace tss
