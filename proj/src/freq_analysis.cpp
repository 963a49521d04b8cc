#include "tss/freq_analysis.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tss {

namespace {

Spectrum run_fftw(const std::vector<std::complex<double>>& input, int width, int height,
                  int sign) {
  Spectrum out{width, height, std::vector<std::complex<double>>(input.size())};
  // fftw_complex is layout-compatible with std::complex<double>.
  auto* in_ptr = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(input.data()));
  auto* out_ptr = reinterpret_cast<fftw_complex*>(out.bins.data());
  fftw_plan plan = fftw_plan_dft_2d(height, width, in_ptr, out_ptr, sign, FFTW_ESTIMATE);
  if (plan == nullptr) throw std::runtime_error("fftw plan creation failed");
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  return out;
}

int signed_frequency(int k, int n) { return k <= n / 2 ? k : k - n; }

}  // namespace

Spectrum fft2(const Raster& raster) {
  if (raster.empty()) throw std::invalid_argument("fft2 on empty raster");
  std::vector<std::complex<double>> input(raster.values.begin(), raster.values.end());
  return run_fftw(input, raster.width, raster.height, FFTW_FORWARD);
}

Raster ifft2(const Spectrum& spectrum) {
  if (spectrum.bins.empty()) throw std::invalid_argument("ifft2 on empty spectrum");
  const Spectrum back = run_fftw(spectrum.bins, spectrum.width, spectrum.height, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(back.bins.size());
  Raster out(spectrum.width, spectrum.height);
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = back.bins[i].real() * scale;
  return out;
}

std::string_view to_string(Band band) {
  switch (band) {
    case Band::Low: return "low";
    case Band::Medium: return "medium";
    case Band::High: return "high";
  }
  return "unknown";
}

std::string_view to_string(PatchLabel label) {
  switch (label) {
    case PatchLabel::Smooth: return "smooth";
    case PatchLabel::Medium: return "medium";
    case PatchLabel::High: return "high";
  }
  return "unknown";
}

void BandPartition::validate() const {
  if (!(low_cut > 0.0 && low_cut < high_cut && high_cut < 1.0)) {
    throw std::invalid_argument("band cuts must satisfy 0 < low_cut < high_cut < 1");
  }
}

double normalized_radius(int row, int col, int width, int height) {
  const double fy = static_cast<double>(signed_frequency(row, height)) / height;
  const double fx = static_cast<double>(signed_frequency(col, width)) / width;
  return std::hypot(fx, fy) / 0.5;
}

BandMasks band_masks(int width, int height, const BandPartition& partition) {
  partition.validate();
  if (width <= 0 || height <= 0) throw std::invalid_argument("band_masks needs a non-empty grid");
  BandMasks out;
  out.width = width;
  out.height = height;
  const std::size_t n = static_cast<std::size_t>(width) * height;
  for (auto& m : out.masks) m.assign(n, 0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double r = normalized_radius(y, x, width, height);
      const std::size_t i = static_cast<std::size_t>(y) * width + x;
      if (r <= partition.low_cut) {
        out.masks[0][i] = 1;
      } else if (r <= partition.high_cut) {
        out.masks[1][i] = 1;
      } else {
        out.masks[2][i] = 1;
      }
    }
  }
  return out;
}

BandValues band_energy(const Raster& raster, const BandMasks& masks) {
  if (raster.width != masks.width || raster.height != masks.height) {
    throw std::invalid_argument("raster and band masks differ in size");
  }
  const Spectrum spec = fft2(raster);
  BandValues energy{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < spec.bins.size(); ++i) {
    const double p = std::norm(spec.bins[i]);
    for (int b = 0; b < 3; ++b) {
      if (masks.masks[b][i]) energy[b] += p;
    }
  }
  const double n = static_cast<double>(spec.bins.size());
  for (double& e : energy) e /= n;
  return energy;
}

namespace {

Raster difference(const Raster& a, const Raster& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("frame dimensions differ");
  Raster out(a.width, a.height);
  for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = a.values[i] - b.values[i];
  return out;
}

BandValues snr_from_energies(const BandValues& signal, const BandValues& noise) {
  BandValues out{};
  for (int b = 0; b < 3; ++b) {
    out[b] = noise[b] == 0.0 ? kInfiniteSnr : 10.0 * std::log10(signal[b] / noise[b]);
  }
  return out;
}

}  // namespace

BandValues band_snr(const Raster& frame, const Raster& reference, const BandMasks& masks) {
  const BandValues signal = band_energy(reference, masks);
  const BandValues noise = band_energy(difference(reference, frame), masks);
  return snr_from_energies(signal, noise);
}

void Trajectory::validate() const {
  if (frames.size() < 2) throw std::invalid_argument("trajectory needs at least two frames");
  if (timesteps.size() != frames.size()) {
    throw std::invalid_argument("trajectory has " + std::to_string(frames.size()) +
                                " frames but " + std::to_string(timesteps.size()) + " labels");
  }
  for (const auto& f : frames) {
    if (!f.same_shape(frames.front()) || f.empty()) {
      throw std::invalid_argument("trajectory frames must share one non-empty size");
    }
  }
}

std::vector<BandValues> noise_power_series(const Trajectory& traj, const BandMasks& masks) {
  traj.validate();
  std::vector<BandValues> out;
  out.reserve(traj.frames.size());
  for (const auto& frame : traj.frames) {
    out.push_back(band_energy(difference(traj.reference(), frame), masks));
  }
  return out;
}

namespace {

std::vector<BandValues> deltas_of(const std::vector<BandValues>& noise) {
  std::vector<BandValues> out;
  for (std::size_t s = 0; s + 1 < noise.size(); ++s) {
    BandValues d{};
    for (int b = 0; b < 3; ++b) d[b] = noise[s + 1][b] - noise[s][b];
    out.push_back(d);
  }
  return out;
}

}  // namespace

std::vector<BandValues> noise_delta_series(const Trajectory& traj, const BandMasks& masks) {
  if (traj.frames.size() < 3) {
    throw std::invalid_argument("noise delta series needs at least three frames");
  }
  return deltas_of(noise_power_series(traj, masks));
}

BandSNRReport analyze_trajectory(const Trajectory& traj, const BandMasks& masks) {
  const auto noise = noise_power_series(traj, masks);
  const auto deltas = deltas_of(noise);
  const BandValues signal = band_energy(traj.reference(), masks);

  BandSNRReport report;
  for (std::size_t s = 0; s + 1 < traj.frames.size(); ++s) {
    const BandValues snr = snr_from_energies(signal, noise[s]);
    for (Band band : kAllBands) {
      const int b = static_cast<int>(band);
      report.rows.push_back({traj.timesteps[s], band, snr[b], noise[s][b], deltas[s][b]});
    }
  }
  return report;
}

Raster crop(const Raster& raster, int row, int col, int width, int height) {
  if (row < 0 || col < 0 || width <= 0 || height <= 0 || row + height > raster.height ||
      col + width > raster.width) {
    throw std::out_of_range("crop window outside raster");
  }
  Raster out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) out.at(y, x) = raster.at(row + y, col + x);
  }
  return out;
}

std::vector<PatchClass> classify_patches(const Raster& gray, int patch) {
  if (patch <= 0) throw std::invalid_argument("patch size must be positive");
  if (gray.width < patch || gray.height < patch) {
    throw std::invalid_argument("image smaller than one " + std::to_string(patch) + "px patch");
  }
  std::vector<PatchClass> out;
  for (int row = 0; row + patch <= gray.height; row += patch) {
    for (int col = 0; col + patch <= gray.width; col += patch) {
      double sum = 0.0;
      for (int y = 0; y < patch; ++y) {
        for (int x = 0; x < patch; ++x) sum += gray.at(row + y, col + x);
      }
      const double mean = sum / (static_cast<double>(patch) * patch);
      double ss = 0.0;
      for (int y = 0; y < patch; ++y) {
        for (int x = 0; x < patch; ++x) {
          const double d = gray.at(row + y, col + x) - mean;
          ss += d * d;
        }
      }
      out.push_back({PatchLabel::Smooth, row, col, ss / (static_cast<double>(patch) * patch)});
    }
  }

  std::vector<double> sorted;
  sorted.reserve(out.size());
  for (const auto& p : out) sorted.push_back(p.variance);
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double lower = sorted[(n + 2) / 3 - 1];
  const double upper = sorted[(2 * n + 2) / 3 - 1];
  for (auto& p : out) {
    if (p.variance <= lower) {
      p.label = PatchLabel::Smooth;
    } else if (p.variance <= upper) {
      p.label = PatchLabel::Medium;
    } else {
      p.label = PatchLabel::High;
    }
  }
  return out;
}

std::vector<StratifiedRow> stratified_band_snr(const Trajectory& traj,
                                               const std::vector<PatchClass>& classes, int patch,
                                               const BandPartition& partition) {
  traj.validate();
  const BandMasks masks = band_masks(patch, patch, partition);
  const std::size_t steps = traj.frames.size() - 1;

  std::vector<StratifiedRow> rows;
  for (PatchLabel label : {PatchLabel::Smooth, PatchLabel::Medium, PatchLabel::High}) {
    std::vector<BandValues> snr_sum(steps, BandValues{});
    std::vector<BandValues> noise_sum(steps, BandValues{});
    std::vector<BandValues> delta_sum(steps, BandValues{});
    int members = 0;
    for (const auto& pc : classes) {
      if (pc.label != label) continue;
      ++members;
      Trajectory local;
      local.timesteps = traj.timesteps;
      for (const auto& f : traj.frames) local.frames.push_back(crop(f, pc.row, pc.col, patch, patch));
      const auto noise = noise_power_series(local, masks);
      const auto deltas = deltas_of(noise);
      const BandValues signal = band_energy(local.reference(), masks);
      for (std::size_t s = 0; s < steps; ++s) {
        const BandValues snr = snr_from_energies(signal, noise[s]);
        for (int b = 0; b < 3; ++b) {
          snr_sum[s][b] += snr[b];
          noise_sum[s][b] += noise[s][b];
          delta_sum[s][b] += deltas[s][b];
        }
      }
    }
    if (members == 0) continue;
    for (std::size_t s = 0; s < steps; ++s) {
      for (Band band : kAllBands) {
        const int b = static_cast<int>(band);
        rows.push_back({label, traj.timesteps[s], band, snr_sum[s][b] / members,
                        noise_sum[s][b] / members, delta_sum[s][b] / members});
      }
    }
  }
  return rows;
}

}  // namespace tss
