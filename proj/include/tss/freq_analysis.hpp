#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "tss/raster.hpp"

namespace tss {

/// Unnormalized 2D DFT, row-major in natural (uncentered) bin order.
struct Spectrum {
  int width = 0;
  int height = 0;
  std::vector<std::complex<double>> bins;
};

Spectrum fft2(const Raster& raster);
/// Inverse of fft2 (scaled by 1/N); returns the real part.
Raster ifft2(const Spectrum& spectrum);

enum class Band : int { Low = 0, Medium = 1, High = 2 };
inline constexpr std::array<Band, 3> kAllBands{Band::Low, Band::Medium, Band::High};
std::string_view to_string(Band band);

/// Radial cutoffs as fractions of the Nyquist radius.
struct BandPartition {
  double low_cut = 1.0 / 3.0;
  double high_cut = 2.0 / 3.0;

  void validate() const;
};

/// Radius of DFT bin (row, col) in units of the Nyquist radius, measured on
/// the centered spectrum with per-axis normalized frequencies.
double normalized_radius(int row, int col, int width, int height);

/// Disjoint radial masks covering every bin, in fft2's bin order.
struct BandMasks {
  int width = 0;
  int height = 0;
  std::array<std::vector<std::uint8_t>, 3> masks;

  const std::vector<std::uint8_t>& operator[](Band b) const {
    return masks[static_cast<int>(b)];
  }
};

BandMasks band_masks(int width, int height, const BandPartition& partition = {});

using BandValues = std::array<double, 3>;

/// Per-band energy sum_b |X|^2 / N, so the three bands sum to sum |x|^2.
BandValues band_energy(const Raster& raster, const BandMasks& masks);

/// Returned when a band's residual energy is exactly zero.
inline constexpr double kInfiniteSnr = std::numeric_limits<double>::infinity();

/// 10 log10(reference band energy / residual band energy) per band.
BandValues band_snr(const Raster& frame, const Raster& reference, const BandMasks& masks);

/// Denoising trajectory. The last frame is the reference; timesteps descend.
struct Trajectory {
  std::vector<Raster> frames;
  std::vector<double> timesteps;

  void validate() const;
  const Raster& reference() const { return frames.back(); }
};

/// Band energy of (reference - frame) for every frame.
std::vector<BandValues> noise_power_series(const Trajectory& traj, const BandMasks& masks);

/// delta[s] = noise[s + 1] - noise[s] for every non-final step s.
/// Requires at least three frames.
std::vector<BandValues> noise_delta_series(const Trajectory& traj, const BandMasks& masks);

struct BandRow {
  double step;
  Band band;
  double snr_db;
  double noise_power;
  double delta_noise;
};

/// One row per (non-final step, band). The final frame is excluded: it is
/// the reference and carries no noise.
struct BandSNRReport {
  std::vector<BandRow> rows;
};

BandSNRReport analyze_trajectory(const Trajectory& traj, const BandMasks& masks);

enum class PatchLabel : int { Smooth = 0, Medium = 1, High = 2 };
std::string_view to_string(PatchLabel label);

struct PatchClass {
  PatchLabel label;
  int row;
  int col;
  double variance;
};

/// Scores non-overlapping patch x patch tiles by population variance and
/// splits them at the variance terciles. Ties go to the lower class.
/// Partial tiles at the right and bottom edges are dropped.
std::vector<PatchClass> classify_patches(const Raster& gray, int patch = 128);

Raster crop(const Raster& raster, int row, int col, int width, int height);

struct StratifiedRow {
  PatchLabel label;
  double step;
  Band band;
  double snr_db;
  double noise_power;
  double delta_noise;
};

/// Per-patch band statistics averaged within each class. Classes with no
/// patches produce no rows. SNR is averaged in dB, so one noise-free patch
/// makes the class mean infinite.
std::vector<StratifiedRow> stratified_band_snr(const Trajectory& traj,
                                               const std::vector<PatchClass>& classes, int patch,
                                               const BandPartition& partition = {});

}  // namespace tss
