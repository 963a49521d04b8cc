#include "tss/toy_diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

#include "tss/variance_map.hpp"

namespace tss {

namespace {

// Shared per-pixel arithmetic so the global and spatial samplers agree bit for bit.
double predicted_noise(double x_t, double abar, double clean_hat) {
  return (x_t - std::sqrt(abar) * clean_hat) / std::sqrt(1.0 - abar);
}

double ddim_update(double x_t, double abar_from, double abar_to, double eps_hat) {
  const double x0_hat = (x_t - std::sqrt(1.0 - abar_from) * eps_hat) / std::sqrt(abar_from);
  return std::sqrt(abar_to) * x0_hat + std::sqrt(1.0 - abar_to) * eps_hat;
}

void require_same_shape(const Raster& a, const Raster& b, const char* what) {
  if (!a.same_shape(b)) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

int integral_timestep(double t) {
  const double r = std::round(t);
  if (r != t) throw std::invalid_argument("per-pixel timestep is not an integer");
  return static_cast<int>(r);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

double NoiseSchedule::alpha_bar(int t) const {
  if (t < 0 || t > total_steps) {
    throw std::out_of_range("timestep " + std::to_string(t) + " outside [0, " +
                            std::to_string(total_steps) + "]");
  }
  return alphas_cumprod[t];
}

NoiseSchedule make_noise_schedule(int total_steps, double beta_start, double beta_end) {
  if (total_steps <= 0) throw std::invalid_argument("total_steps must be positive");
  if (!(beta_start > 0.0 && beta_start < beta_end && beta_end < 1.0)) {
    throw std::invalid_argument("betas must satisfy 0 < beta_start < beta_end < 1");
  }
  NoiseSchedule out;
  out.total_steps = total_steps;
  out.alphas_cumprod.resize(total_steps + 1);
  out.alphas_cumprod[0] = 1.0;
  for (int t = 1; t <= total_steps; ++t) {
    const double frac = total_steps == 1 ? 0.0 : static_cast<double>(t - 1) / (total_steps - 1);
    const double beta = beta_start + (beta_end - beta_start) * frac;
    out.alphas_cumprod[t] = out.alphas_cumprod[t - 1] * (1.0 - beta);
  }
  return out;
}

Raster forward_noise(const Raster& x0, int t, const Raster& eps, const NoiseSchedule& schedule) {
  require_same_shape(x0, eps, "forward_noise");
  const double abar = schedule.alpha_bar(t);
  const double a = std::sqrt(abar);
  const double b = std::sqrt(1.0 - abar);
  Raster out(x0.width, x0.height);
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = a * x0.values[i] + b * eps.values[i];
  return out;
}

Raster forward_noise_spatial(const Raster& x0, const Raster& timesteps, const Raster& eps,
                             const NoiseSchedule& schedule) {
  require_same_shape(x0, eps, "forward_noise_spatial");
  require_same_shape(x0, timesteps, "forward_noise_spatial");
  Raster out(x0.width, x0.height);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double abar = schedule.alpha_bar(integral_timestep(timesteps.values[i]));
    out.values[i] = std::sqrt(abar) * x0.values[i] + std::sqrt(1.0 - abar) * eps.values[i];
  }
  return out;
}

Raster predicted_clean(const Raster& x0, int t, int total_steps, double blur_strength) {
  if (blur_strength < 0.0) throw std::invalid_argument("blur_strength must be >= 0");
  const double sigma = blur_strength * static_cast<double>(t) / total_steps;
  if (sigma <= 0.0) return x0;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  return gaussian_blur(x0, 2 * radius + 1, sigma);
}

Raster analytic_denoiser(const Raster& x_t, int t, const Raster& x0, double blur_strength,
                         const NoiseSchedule& schedule) {
  require_same_shape(x_t, x0, "analytic_denoiser");
  if (t <= 0) throw std::invalid_argument("analytic_denoiser needs t > 0");
  const double abar = schedule.alpha_bar(t);
  const Raster clean_hat = predicted_clean(x0, t, schedule.total_steps, blur_strength);
  Raster eps(x_t.width, x_t.height);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    eps.values[i] = predicted_noise(x_t.values[i], abar, clean_hat.values[i]);
  }
  return eps;
}

Raster ddim_step(const Raster& x_t, int t_from, int t_to, const Raster& eps_hat,
                 const NoiseSchedule& schedule) {
  require_same_shape(x_t, eps_hat, "ddim_step");
  if (t_to >= t_from) {
    throw std::invalid_argument("ddim_step needs t_to < t_from (got " + std::to_string(t_from) +
                                " -> " + std::to_string(t_to) + ")");
  }
  const double abar_from = schedule.alpha_bar(t_from);
  const double abar_to = schedule.alpha_bar(t_to);
  Raster out(x_t.width, x_t.height);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values[i] = ddim_update(x_t.values[i], abar_from, abar_to, eps_hat.values[i]);
  }
  return out;
}

std::vector<int> denoising_order(const Schedule& schedule) {
  return {schedule.quantized.rbegin(), schedule.quantized.rend()};
}

Trajectory run_sampler(const Raster& x_start, std::span<const int> descending_steps,
                       const DenoiserConfig& denoiser, const NoiseSchedule& schedule) {
  if (descending_steps.empty()) throw std::invalid_argument("empty schedule");
  require_same_shape(x_start, denoiser.clean, "run_sampler");

  std::vector<int> path(descending_steps.begin(), descending_steps.end());
  path.push_back(0);

  Trajectory traj;
  traj.frames.push_back(x_start);
  traj.timesteps.push_back(path.front());
  Raster x = x_start;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const int t_from = path[i];
    const int t_to = path[i + 1];
    if (t_to > t_from) throw std::invalid_argument("schedule is not in denoising order");
    if (t_to < t_from) {
      const Raster eps = analytic_denoiser(x, t_from, denoiser.clean, denoiser.blur_strength,
                                           schedule);
      x = ddim_step(x, t_from, t_to, eps, schedule);
    }
    traj.frames.push_back(x);
    traj.timesteps.push_back(t_to);
  }
  return traj;
}

Trajectory run_sampler_spatial(const Raster& x_start, const SpatialScheduleMap& map,
                               const DenoiserConfig& denoiser, const NoiseSchedule& schedule) {
  if (x_start.width != map.width() || x_start.height != map.height()) {
    throw std::invalid_argument("spatial schedule grid does not match the sample");
  }
  require_same_shape(x_start, denoiser.clean, "run_sampler_spatial");
  const int iterations = map.inference_steps();
  if (iterations < 1) throw std::invalid_argument("empty spatial schedule");

  auto max_of = [](const Raster& r) {
    return *std::max_element(r.values.begin(), r.values.end());
  };

  Trajectory traj;
  Raster from = quantized_timestep_at(map, iterations);
  traj.frames.push_back(x_start);
  traj.timesteps.push_back(max_of(from));

  Raster x = x_start;
  for (int k = iterations; k >= 1; --k) {
    const Raster to = k > 1 ? quantized_timestep_at(map, k - 1) : Raster(x.width, x.height, 0.0);
    std::map<int, Raster> clean_by_t;
    Raster next = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const int t_from = integral_timestep(from.values[i]);
      const int t_to = integral_timestep(to.values[i]);
      if (t_to > t_from) throw std::invalid_argument("per-pixel schedule is not ascending");
      if (t_to == t_from) continue;
      auto it = clean_by_t.find(t_from);
      if (it == clean_by_t.end()) {
        it = clean_by_t
                 .emplace(t_from, predicted_clean(denoiser.clean, t_from, schedule.total_steps,
                                                  denoiser.blur_strength))
                 .first;
      }
      const double abar_from = schedule.alpha_bar(t_from);
      const double eps = predicted_noise(x.values[i], abar_from, it->second.values[i]);
      next.values[i] = ddim_update(x.values[i], abar_from, schedule.alpha_bar(t_to), eps);
    }
    x = std::move(next);
    traj.frames.push_back(x);
    traj.timesteps.push_back(max_of(to));
    from = to;
  }
  return traj;
}

Raster gaussian_noise(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Raster out(width, height);
  for (double& v : out.values) v = normal(rng);
  return out;
}

double rms(const Raster& r) {
  if (r.empty()) return 0.0;
  double ss = 0.0;
  for (double v : r.values) ss += v * v;
  return std::sqrt(ss / static_cast<double>(r.size()));
}

double rms_difference(const Raster& a, const Raster& b) {
  require_same_shape(a, b, "rms_difference");
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(a.size()));
}

Raster make_toy_target(int width, int height, const BandWeights& weights, std::uint64_t seed) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("target must be non-empty");
  if (weights.low < 0 || weights.medium < 0 || weights.high < 0 ||
      weights.low + weights.medium + weights.high <= 0) {
    throw std::invalid_argument("band weights must be non-negative and not all zero");
  }
  const Raster noise = gaussian_noise(width, height, seed);
  const Spectrum spectrum = fft2(noise);
  const BandMasks masks = band_masks(width, height);
  const BandValues target_energy{weights.low, weights.medium, weights.high};

  Raster out(width, height, 0.0);
  for (Band band : kAllBands) {
    const int b = static_cast<int>(band);
    if (target_energy[b] == 0.0) continue;
    Spectrum part = spectrum;
    for (std::size_t i = 0; i < part.bins.size(); ++i) {
      if (!masks[band][i]) part.bins[i] = 0.0;
    }
    const Raster component = ifft2(part);
    const double r = rms(component);
    if (r == 0.0) continue;
    const double scale = std::sqrt(target_energy[b]) / r;
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += scale * component.values[i];
  }
  const double r = rms(out);
  if (r == 0.0) throw std::runtime_error("toy target has zero energy");
  for (double& v : out.values) v /= r;
  return out;
}

Raster make_split_target(int width, int height, std::uint64_t seed) {
  const Raster smooth = make_toy_target(width, height, {1.0, 0.0, 0.0}, derive_seed(seed, 10));
  const Raster textured = make_toy_target(width, height, {0.2, 0.4, 1.0}, derive_seed(seed, 11));
  Raster out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      out.at(y, x) = x < width / 2 ? smooth.at(y, x) : textured.at(y, x);
    }
  }
  const double r = rms(out);
  for (double& v : out.values) v /= r;
  return out;
}

void ExperimentConfig::validate() const {
  if (total_steps <= 0) throw std::invalid_argument("T must be positive");
  if (inference_steps < 1 || inference_steps > total_steps) {
    throw std::invalid_argument("T_prime must lie in [1, T]");
  }
  load_preset(preset);
  if (!(blur >= 0.0)) throw std::invalid_argument("blur must be >= 0");
  if (fixture != "split" && fixture != "bands") {
    throw std::invalid_argument("fixture must be 'split' or 'bands'");
  }
  if (patch <= 0) throw std::invalid_argument("patch must be positive");
  if (width < patch || height < patch) {
    throw std::invalid_argument("fixture must be at least one patch in each dimension");
  }
  partition.validate();
}

namespace {

StrategyResult score(std::string name, Trajectory traj, const Raster& target,
                     const std::vector<PatchClass>& classes, const ExperimentConfig& config) {
  StrategyResult result;
  result.strategy = std::move(name);
  result.steps = config.inference_steps;
  const Raster& final_frame = traj.frames.back();
  result.snr_db = band_snr(final_frame, target, band_masks(target.width, target.height,
                                                           config.partition));
  result.rms_error = rms_difference(final_frame, target);

  const BandMasks patch_masks = band_masks(config.patch, config.patch, config.partition);
  std::array<double, 3> sum{};
  std::array<int, 3> count{};
  for (const auto& pc : classes) {
    const auto snr = band_snr(crop(final_frame, pc.row, pc.col, config.patch, config.patch),
                              crop(target, pc.row, pc.col, config.patch, config.patch),
                              patch_masks);
    const int c = static_cast<int>(pc.label);
    sum[c] += snr[static_cast<int>(Band::High)];
    ++count[c];
  }
  for (int c = 0; c < 3; ++c) {
    result.class_high_snr_db[c] =
        count[c] > 0 ? sum[c] / count[c] : std::numeric_limits<double>::quiet_NaN();
  }
  result.trajectory = std::move(traj);
  return result;
}

}  // namespace

ComparisonResult run_comparison(const ExperimentConfig& config) {
  config.validate();
  const Preset preset = load_preset(config.preset);
  const NoiseSchedule noise_schedule = make_noise_schedule(config.total_steps);

  ComparisonResult out;
  out.target = config.fixture == "split"
                   ? make_split_target(config.width, config.height, config.seed)
                   : make_toy_target(config.width, config.height, config.weights,
                                     derive_seed(config.seed, 0));
  const Raster& target = out.target;
  const Raster eps = gaussian_noise(config.width, config.height, derive_seed(config.seed, 1));
  const DenoiserConfig denoiser{target, config.blur};
  const auto classes = classify_patches(target, config.patch);

  const Schedule uniform = uniform_schedule(config.total_steps, config.inference_steps);
  {
    const auto order = denoising_order(uniform);
    const Raster x_start = forward_noise(target, order.front(), eps, noise_schedule);
    out.strategies.push_back(score("uniform",
                                   run_sampler(x_start, order, denoiser, noise_schedule),
                                   target, classes, config));
  }

  SamplerParams tds_params;
  tds_params.total_steps = config.total_steps;
  tds_params.inference_steps = config.inference_steps;
  tds_params.power = preset.n_mid();
  tds_params.transition_fraction = preset.a_mid();
  tds_params.kind = ResampleKind::Polynomial;
  {
    const auto order = denoising_order(build_tds_schedule(tds_params));
    const Raster x_start = forward_noise(target, order.front(), eps, noise_schedule);
    out.strategies.push_back(score("tds", run_sampler(x_start, order, denoiser, noise_schedule),
                                   target, classes, config));
  }

  {
    const ImageRaster image = ImageRaster::from_raster(minmax_normalize(target));
    const VarianceMap vmap = variance_map(image);
    const SpatialScheduleMap map =
        build_spatial_schedule(vmap, ProjectionBounds::from_preset(preset), config.total_steps,
                               config.inference_steps, ResampleKind::Polynomial);
    const Raster start_t = quantized_timestep_at(map, config.inference_steps);
    const Raster x_start = forward_noise_spatial(target, start_t, eps, noise_schedule);
    out.strategies.push_back(score("tss",
                                   run_sampler_spatial(x_start, map, denoiser, noise_schedule),
                                   target, classes, config));
  }
  return out;
}

}  // namespace tss
