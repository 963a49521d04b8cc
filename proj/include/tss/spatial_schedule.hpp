#pragma once

#include <span>

#include "tss/raster.hpp"
#include "tss/schedule_core.hpp"
#include "tss/variance_map.hpp"

namespace tss {

/// Ranges that local variance is linearly projected into.
struct ProjectionBounds {
  double n_min = 1.0;
  double n_max = 1.0;
  double a_min = 0.5;
  double a_max = 0.5;

  void validate() const;
  static ProjectionBounds from_preset(const Preset& preset);
};

struct ProjectedParams {
  double power;
  double transition_fraction;
};

/// Per-pixel schedules, H x W x T' (channels-last). Every pixel walks its own
/// ascending slice; denoising iteration k uses entry k-1 of every slice.
struct SpatialScheduleMap {
  int total_steps = 0;
  ResampleKind kind = ResampleKind::Polynomial;
  double exp_slope = 0.004;
  ProjectionBounds bounds;
  Tensor3 steps;

  int width() const { return steps.width; }
  int height() const { return steps.height; }
  int inference_steps() const { return steps.depth; }
  std::span<const double> slice(int row, int col) const {
    return {steps.data.data() + steps.offset(row, col), static_cast<std::size_t>(steps.depth)};
  }
};

/// n = v (n_max - n_min) + n_min and a = v (a_max - a_min) + a_min.
ProjectedParams project_params(double v, const ProjectionBounds& bounds);

SpatialScheduleMap build_spatial_schedule(const VarianceMap& vmap, const ProjectionBounds& bounds,
                                          int total_steps, int inference_steps,
                                          ResampleKind kind = ResampleKind::Polynomial,
                                          double exp_slope = 0.004);

/// The H x W raster of timesteps for iteration k in [1, T'].
Raster spatial_timestep_at(const SpatialScheduleMap& map, int k);

/// Same as spatial_timestep_at, rounded to the nearest integer timestep.
Raster quantized_timestep_at(const SpatialScheduleMap& map, int k);

/// Bilinear resampling with corner alignment, clamped to [0, 1].
VarianceMap resize_variance_to_grid(const VarianceMap& vmap, int width, int height);

}  // namespace tss
