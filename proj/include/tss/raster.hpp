#pragma once

#include <cstddef>
#include <vector>

namespace tss {

/// Single-channel H x W grid of reals, row-major.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  Raster() = default;
  Raster(int w, int h, double fill = 0.0);

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  double& at(int row, int col) { return values[static_cast<std::size_t>(row) * width + col]; }
  double at(int row, int col) const {
    return values[static_cast<std::size_t>(row) * width + col];
  }
  bool same_shape(const Raster& other) const {
    return width == other.width && height == other.height;
  }

  friend bool operator==(const Raster&, const Raster&) = default;
};

/// Interleaved image with 1 or 3 channels, samples in [0, 1].
struct ImageRaster {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<double> pixels;

  /// Throws std::invalid_argument on a bad shape or out-of-range samples.
  void validate() const;
  static ImageRaster from_raster(const Raster& gray);
  /// The single channel of a grayscale image as a Raster.
  Raster to_raster() const;
};

/// H x W x C tensor in channels-last order.
struct Tensor3 {
  int height = 0;
  int width = 0;
  int depth = 0;
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(int h, int w, int d, double fill = 0.0);

  std::size_t offset(int row, int col) const {
    return (static_cast<std::size_t>(row) * width + col) * depth;
  }
  double& at(int row, int col, int ch) { return data[offset(row, col) + ch]; }
  double at(int row, int col, int ch) const { return data[offset(row, col) + ch]; }
  bool same_shape(const Tensor3& o) const {
    return height == o.height && width == o.width && depth == o.depth;
  }

  friend bool operator==(const Tensor3&, const Tensor3&) = default;
};

/// Reflect-101 index folding (d c b | a b c d | c b a) for any offset,
/// including offsets further than one image width outside.
int mirror_index(int i, int n);

}  // namespace tss
