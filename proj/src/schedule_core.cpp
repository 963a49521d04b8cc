#include "tss/schedule_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tss {

namespace {

void check_timestep(double t, int total_steps) {
  if (!(t >= 0.0 && t <= static_cast<double>(total_steps))) {
    throw std::invalid_argument("timestep " + std::to_string(t) + " outside [0, " +
                                std::to_string(total_steps) + "]");
  }
}

void check_total(int total_steps) {
  if (total_steps <= 0) {
    throw std::invalid_argument("total_steps must be positive");
  }
}

void check_transition(double a, int total_steps) {
  if (!(a >= 0.0 && a <= static_cast<double>(total_steps))) {
    throw std::invalid_argument("transition point outside [0, T]");
  }
}

constexpr std::array<std::pair<ResampleKind, std::string_view>, 4> kKindNames{{
    {ResampleKind::Uniform, "uniform"},
    {ResampleKind::Polynomial, "polynomial"},
    {ResampleKind::Trigonometric, "trigonometric"},
    {ResampleKind::Exponential, "exponential"},
}};

}  // namespace

std::string_view to_string(ResampleKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

ResampleKind parse_resample_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw std::invalid_argument("unknown schedule kind '" + std::string(name) + "'");
}

void SamplerParams::validate() const {
  check_total(total_steps);
  if (inference_steps < 1 || inference_steps > total_steps) {
    throw std::invalid_argument("inference_steps must lie in [1, total_steps]");
  }
  if (!(power >= 1.0) || !std::isfinite(power)) {
    throw std::invalid_argument("power must be a finite value >= 1");
  }
  if (!(transition_fraction >= 0.0 && transition_fraction <= 1.0)) {
    throw std::invalid_argument("transition_fraction must lie in [0, 1]");
  }
  if (!(exp_slope > 0.0) || !std::isfinite(exp_slope)) {
    throw std::invalid_argument("exp_slope must be positive");
  }
}

Schedule uniform_schedule(int total_steps, int inference_steps) {
  if (total_steps <= 0 || inference_steps <= 0) {
    throw std::invalid_argument("T and T' must be positive");
  }
  if (inference_steps > total_steps) {
    throw std::invalid_argument("T' must not exceed T");
  }
  Schedule out;
  out.params.total_steps = total_steps;
  out.params.inference_steps = inference_steps;
  out.params.kind = ResampleKind::Uniform;
  out.steps.reserve(inference_steps);
  out.quantized.reserve(inference_steps);
  for (long long k = 1; k <= inference_steps; ++k) {
    const auto t = static_cast<int>(k * total_steps / inference_steps);
    out.steps.push_back(static_cast<double>(t));
    out.quantized.push_back(t);
  }
  return out;
}

double resample_polynomial(double t, double a, double n, int total_steps) {
  check_total(total_steps);
  check_timestep(t, total_steps);
  check_transition(a, total_steps);
  if (!(n >= 1.0)) {
    throw std::invalid_argument("power must be >= 1");
  }
  const double T = total_steps;
  // Branch selection on the degenerate ends avoids 0^0 and 0/0.
  const bool early = a >= T || t < a;
  if (early) {
    return std::pow(t, n) / std::pow(a, n - 1.0);
  }
  return T - std::pow(T - t, n) / std::pow(T - a, n - 1.0);
}

double resample_trigonometric(double t, double a, int total_steps) {
  check_total(total_steps);
  check_timestep(t, total_steps);
  check_transition(a, total_steps);
  const double T = total_steps;
  const bool early = a >= T || t < a;
  if (early) {
    return -a * std::cos(std::numbers::pi * t / (2.0 * a)) + a;
  }
  return -a * std::sin(std::numbers::pi * (t - a) / (2.0 * (T - a))) + T;
}

double resample_exponential(double t, double k, int total_steps) {
  check_total(total_steps);
  check_timestep(t, total_steps);
  if (!(k > 0.0)) {
    throw std::invalid_argument("exponential slope must be positive");
  }
  const double T = total_steps;
  return T / (1.0 + std::exp(-k * (t - T / 2.0)));
}

Schedule build_tds_schedule(const SamplerParams& params) {
  params.validate();
  Schedule uniform = uniform_schedule(params.total_steps, params.inference_steps);
  if (params.kind == ResampleKind::Uniform) {
    uniform.params = params;
    return uniform;
  }

  const double a = params.transition_point();
  Schedule out;
  out.params = params;
  out.steps.reserve(uniform.size());
  for (double t : uniform.steps) {
    switch (params.kind) {
      case ResampleKind::Polynomial:
        out.steps.push_back(resample_polynomial(t, a, params.power, params.total_steps));
        break;
      case ResampleKind::Trigonometric:
        out.steps.push_back(resample_trigonometric(t, a, params.total_steps));
        break;
      case ResampleKind::Exponential:
        out.steps.push_back(resample_exponential(t, params.exp_slope, params.total_steps));
        break;
      case ResampleKind::Uniform:
        break;
    }
  }
  // Only the trigonometric map is non-monotone; for the others this is a no-op.
  std::sort(out.steps.begin(), out.steps.end());

  out.quantized.reserve(out.steps.size());
  for (double s : out.steps) {
    out.quantized.push_back(static_cast<int>(std::lround(s)));
  }
  return out;
}

Preset load_preset(std::string_view name) {
  if (name == "stablesr") return {"stablesr", 1.0, 1.2, 0.45, 0.65};
  if (name == "pasd") return {"pasd", 1.0, 2.0, 0.4, 0.6};
  if (name == "supir") return {"supir", 2.2, 2.5, 0.58, 0.63};
  throw std::invalid_argument("unknown preset '" + std::string(name) +
                              "' (expected stablesr, pasd or supir)");
}

std::vector<std::string> preset_names() { return {"stablesr", "pasd", "supir"}; }

int count_extreme_steps(const std::vector<double>& steps, int total_steps, double lo_frac,
                        double hi_frac) {
  const double lo = lo_frac * total_steps;
  const double hi = hi_frac * total_steps;
  return static_cast<int>(std::count_if(steps.begin(), steps.end(), [&](double s) {
    return (s >= 0.0 && s <= lo) || (s >= hi && s <= total_steps);
  }));
}

}  // namespace tss
