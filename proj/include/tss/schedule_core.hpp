#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tss {

enum class ResampleKind { Uniform, Polynomial, Trigonometric, Exponential };

std::string_view to_string(ResampleKind kind);
/// Accepts the lowercase names used on the command line and in JSON.
ResampleKind parse_resample_kind(std::string_view name);

/// Parameters for a time-dynamic (non-uniform) schedule.
///
/// `transition_fraction` is the early/late transition point expressed as a
/// fraction of `total_steps`; it is converted to an absolute timestep
/// internally. `power` is ignored by the trigonometric and exponential kinds,
/// `exp_slope` is used only by the exponential kind.
struct SamplerParams {
  int total_steps = 1000;
  int inference_steps = 50;
  double power = 1.0;
  double transition_fraction = 0.5;
  ResampleKind kind = ResampleKind::Polynomial;
  double exp_slope = 0.004;

  /// Throws std::invalid_argument when any field is outside its domain.
  void validate() const;
  double transition_point() const { return transition_fraction * total_steps; }
};

/// Ascending timesteps in [0, T]. `steps` holds the real-valued resampled
/// values, `quantized` the same values rounded to the nearest integer.
/// Rounding may produce repeated timesteps; they are kept.
struct Schedule {
  SamplerParams params;
  std::vector<double> steps;
  std::vector<int> quantized;

  std::size_t size() const { return steps.size(); }
};

struct Preset {
  std::string name;
  double n_min = 1.0;
  double n_max = 1.0;
  double a_min = 0.5;
  double a_max = 0.5;

  double n_mid() const { return 0.5 * (n_min + n_max); }
  double a_mid() const { return 0.5 * (a_min + a_max); }
};

/// { floor(k * T / T') : k = 1..T' } with exact integer division.
Schedule uniform_schedule(int total_steps, int inference_steps);

/// Two-stage polynomial resampling. `a` is an absolute timestep in [0, T].
/// a = 0 selects the late-stage branch everywhere, a = T the early-stage one.
double resample_polynomial(double t, double a, double n, int total_steps);

/// Trigonometric resampling, evaluated exactly as the two printed branches.
/// The function jumps from a to T at t = a and its upper branch decreases
/// from T to T - a.
double resample_trigonometric(double t, double a, int total_steps);

/// Logistic resampling T / (1 + exp(-k (t - T/2))).
double resample_exponential(double t, double k, int total_steps);

/// Maps every uniform step through the resampling function selected by
/// `params.kind`, then stores the values ascending.
Schedule build_tds_schedule(const SamplerParams& params);

/// Hyperparameter ranges for the three anchor methods: stablesr, pasd, supir.
Preset load_preset(std::string_view name);
std::vector<std::string> preset_names();

/// Number of entries lying in [0, lo_frac*T] or [hi_frac*T, T].
int count_extreme_steps(const std::vector<double>& steps, int total_steps,
                        double lo_frac = 0.2, double hi_frac = 0.8);

}  // namespace tss
