#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tss/freq_analysis.hpp"
#include "tss/raster.hpp"
#include "tss/schedule_core.hpp"
#include "tss/spatial_schedule.hpp"

namespace tss {

/// Variance-preserving forward process: alphas_cumprod[t] for t = 0..T,
/// with alphas_cumprod[0] = 1.
struct NoiseSchedule {
  int total_steps = 0;
  std::vector<double> alphas_cumprod;

  double alpha_bar(int t) const;
};

/// Linear betas from beta_start to beta_end over t = 1..T.
NoiseSchedule make_noise_schedule(int total_steps, double beta_start = 1e-4,
                                  double beta_end = 0.02);

/// sqrt(abar_t) x0 + sqrt(1 - abar_t) eps.
Raster forward_noise(const Raster& x0, int t, const Raster& eps, const NoiseSchedule& schedule);

/// forward_noise with a per-pixel timestep raster (values must be integral).
Raster forward_noise_spatial(const Raster& x0, const Raster& timesteps, const Raster& eps,
                             const NoiseSchedule& schedule);

/// Idealized denoiser: knows x0, but sees it through a Gaussian blur whose
/// sigma grows linearly with t, sigma(t) = blur_strength * t / T. High
/// frequencies are therefore only recovered near the end of sampling.
struct DenoiserConfig {
  Raster clean;
  double blur_strength = 0.0;
};

/// The denoiser's estimate of x0 at timestep t.
Raster predicted_clean(const Raster& x0, int t, int total_steps, double blur_strength);

/// eps_hat = (x_t - sqrt(abar_t) x0_tilde) / sqrt(1 - abar_t). t = 0 is rejected.
Raster analytic_denoiser(const Raster& x_t, int t, const Raster& x0, double blur_strength,
                         const NoiseSchedule& schedule);

/// Deterministic DDIM update from t_from to t_to < t_from.
Raster ddim_step(const Raster& x_t, int t_from, int t_to, const Raster& eps_hat,
                 const NoiseSchedule& schedule);

/// Quantized steps in denoising (descending) order.
std::vector<int> denoising_order(const Schedule& schedule);

/// Runs DDIM along `descending_steps` and finishes at t = 0. Frames are
/// recorded after every update; the first frame is x_T. Repeated timesteps
/// leave the sample unchanged.
Trajectory run_sampler(const Raster& x_start, std::span<const int> descending_steps,
                       const DenoiserConfig& denoiser, const NoiseSchedule& schedule);

/// Lockstep per-pixel sampling: at iteration k every pixel moves from its
/// own k-th timestep to its (k-1)-th (0 after the first). Frames are labeled
/// with the largest per-pixel timestep.
Trajectory run_sampler_spatial(const Raster& x_start, const SpatialScheduleMap& map,
                               const DenoiserConfig& denoiser, const NoiseSchedule& schedule);

/// Relative energy of the low, medium and high bands of a synthetic target.
struct BandWeights {
  double low = 1.0;
  double medium = 0.5;
  double high = 0.25;
};

/// Sum of band-limited Gaussian-noise components, rescaled to unit RMS.
Raster make_toy_target(int width, int height, const BandWeights& weights, std::uint64_t seed);

/// Left half smooth (low band only), right half textured (high band heavy).
Raster make_split_target(int width, int height, std::uint64_t seed);

Raster gaussian_noise(int width, int height, std::uint64_t seed);

double rms(const Raster& r);
double rms_difference(const Raster& a, const Raster& b);

/// Settings for the uniform / TDS / TSS comparison run.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  int total_steps = 1000;
  int inference_steps = 7;
  std::string preset = "supir";
  double blur = 4.0;
  std::string fixture = "split";  // "split" or "bands"
  int width = 128;
  int height = 128;
  int patch = 32;
  BandWeights weights;
  BandPartition partition;

  void validate() const;
};

struct StrategyResult {
  std::string strategy;
  int steps = 0;
  BandValues snr_db{};
  /// High-band SNR per patch class (smooth, medium, high texture).
  std::array<double, 3> class_high_snr_db{};
  double rms_error = 0.0;
  Trajectory trajectory;
};

struct ComparisonResult {
  Raster target;
  std::vector<StrategyResult> strategies;
};

/// Runs uniform, TDS (preset midpoints) and TSS (preset bounds, variance map
/// of the target) from the same noise draw and scores each final frame
/// against the target.
ComparisonResult run_comparison(const ExperimentConfig& config);

}  // namespace tss
