#pragma once

#include <filesystem>

#include "tss/io/io_error.hpp"
#include "tss/raster.hpp"

namespace tss::io {

/// Reads 8/16-bit PNG (gray, gray+alpha, RGB, RGBA) or binary/ASCII PGM/PPM.
/// Samples are scaled to [0, 1]; alpha is dropped. Color images keep three
/// channels.
ImageRaster read_image(const std::filesystem::path& path);

/// Writes an 8-bit grayscale PNG of values in [0, 1] (clamped, x255, rounded).
void write_png_gray(const std::filesystem::path& path, const Raster& raster);

/// Writes a binary 8-bit PGM of values in [0, 1].
void write_pgm(const std::filesystem::path& path, const Raster& raster);

}  // namespace tss::io
