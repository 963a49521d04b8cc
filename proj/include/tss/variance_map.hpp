#pragma once

#include <optional>
#include <vector>

#include "tss/raster.hpp"

namespace tss {

/// Normalized local-variance raster with values in [0, 1].
using VarianceMap = Raster;

inline constexpr int kDefaultVarianceWindow = 33;

/// Sigma used when only a kernel size is known: the kernel spans about +-3 sigma.
inline double default_sigma(int window) { return window / 6.0; }

/// Luma conversion 0.299 R + 0.587 G + 0.114 B; grayscale input passes through.
ImageRaster to_grayscale(const ImageRaster& img);

/// Population variance over a window x window neighbourhood of every pixel,
/// with reflect-101 padding at the borders. `window` must be odd.
Raster local_variance(const Raster& gray, int window = kDefaultVarianceWindow);

/// Normalized 1D Gaussian taps of length `window` (odd).
std::vector<double> gaussian_kernel(int window, double sigma);

/// Separable Gaussian convolution with reflect-101 padding.
Raster gaussian_blur(const Raster& raster, int window, double sigma);

/// (x - min) / (max - min); a constant raster maps to all zeros.
Raster minmax_normalize(const Raster& raster);

/// grayscale -> local variance -> Gaussian blur of the same size -> min-max.
/// `sigma` defaults to default_sigma(window).
VarianceMap variance_map(const ImageRaster& img, int window = kDefaultVarianceWindow,
                         std::optional<double> sigma = std::nullopt);

}  // namespace tss
