#include "tss/variance_map.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tss {

namespace {

void require_odd_window(int window) {
  if (window <= 0 || window % 2 == 0) {
    throw std::invalid_argument("window must be an odd positive integer, got " +
                                std::to_string(window));
  }
}

// Applies `taps` (centered, odd length) along rows then columns.
Raster separable_filter(const Raster& in, const std::vector<double>& taps) {
  const int r = static_cast<int>(taps.size()) / 2;
  Raster tmp(in.width, in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) {
        acc += taps[k + r] * in.at(y, mirror_index(x + k, in.width));
      }
      tmp.at(y, x) = acc;
    }
  }
  Raster out(in.width, in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) {
        acc += taps[k + r] * tmp.at(mirror_index(y + k, in.height), x);
      }
      out.at(y, x) = acc;
    }
  }
  return out;
}

}  // namespace

ImageRaster to_grayscale(const ImageRaster& img) {
  if (img.channels == 1) return img;
  if (img.channels != 3) {
    throw std::invalid_argument("unsupported channel count " + std::to_string(img.channels));
  }
  ImageRaster out{img.width, img.height, 1, {}};
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  out.pixels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = &img.pixels[3 * i];
    out.pixels[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
  }
  return out;
}

Raster local_variance(const Raster& gray, int window) {
  require_odd_window(window);
  if (gray.empty()) throw std::invalid_argument("local_variance on empty raster");

  // Shifting by a sample keeps E[x^2] - E[x]^2 well conditioned and makes a
  // constant input exactly zero.
  const double shift = gray.values.front();
  Raster centered(gray.width, gray.height);
  Raster squared(gray.width, gray.height);
  for (std::size_t i = 0; i < gray.size(); ++i) {
    const double d = gray.values[i] - shift;
    centered.values[i] = d;
    squared.values[i] = d * d;
  }

  const std::vector<double> box(window, 1.0);
  const Raster sum = separable_filter(centered, box);
  const Raster sum_sq = separable_filter(squared, box);
  const double count = static_cast<double>(window) * window;

  Raster out(gray.width, gray.height);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double mean = sum.values[i] / count;
    out.values[i] = std::max(0.0, sum_sq.values[i] / count - mean * mean);
  }
  return out;
}

std::vector<double> gaussian_kernel(int window, double sigma) {
  require_odd_window(window);
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("sigma must be positive");
  }
  const int r = window / 2;
  std::vector<double> taps(window);
  double total = 0.0;
  for (int k = -r; k <= r; ++k) {
    taps[k + r] = std::exp(-(k * k) / (2.0 * sigma * sigma));
    total += taps[k + r];
  }
  for (double& t : taps) t /= total;
  return taps;
}

Raster gaussian_blur(const Raster& raster, int window, double sigma) {
  const auto taps = gaussian_kernel(window, sigma);
  if (raster.empty()) return raster;
  return separable_filter(raster, taps);
}

Raster minmax_normalize(const Raster& raster) {
  if (raster.empty()) throw std::invalid_argument("minmax_normalize on empty raster");
  const auto [lo, hi] = std::minmax_element(raster.values.begin(), raster.values.end());
  const double min = *lo;
  const double range = *hi - min;
  Raster out(raster.width, raster.height, 0.0);
  if (range == 0.0) return out;
  for (std::size_t i = 0; i < raster.size(); ++i) {
    out.values[i] = std::clamp((raster.values[i] - min) / range, 0.0, 1.0);
  }
  return out;
}

VarianceMap variance_map(const ImageRaster& img, int window, std::optional<double> sigma) {
  img.validate();
  const Raster gray = to_grayscale(img).to_raster();
  const Raster v0 = local_variance(gray, window);
  const Raster blurred = gaussian_blur(v0, window, sigma.value_or(default_sigma(window)));
  return minmax_normalize(blurred);
}

}  // namespace tss
