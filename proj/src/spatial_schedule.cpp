#include "tss/spatial_schedule.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace tss {

void ProjectionBounds::validate() const {
  if (!(n_min >= 1.0) || !(n_max >= n_min) || !std::isfinite(n_max)) {
    throw std::invalid_argument("projection bounds need 1 <= n_min <= n_max");
  }
  if (!(a_min >= 0.0) || !(a_max >= a_min) || !(a_max <= 1.0)) {
    throw std::invalid_argument("projection bounds need 0 <= a_min <= a_max <= 1");
  }
}

ProjectionBounds ProjectionBounds::from_preset(const Preset& preset) {
  return {preset.n_min, preset.n_max, preset.a_min, preset.a_max};
}

ProjectedParams project_params(double v, const ProjectionBounds& bounds) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument("variance value outside [0, 1]");
  }
  return {v * (bounds.n_max - bounds.n_min) + bounds.n_min,
          v * (bounds.a_max - bounds.a_min) + bounds.a_min};
}

SpatialScheduleMap build_spatial_schedule(const VarianceMap& vmap, const ProjectionBounds& bounds,
                                          int total_steps, int inference_steps,
                                          ResampleKind kind, double exp_slope) {
  bounds.validate();
  if (vmap.empty()) throw std::invalid_argument("empty variance map");

  SpatialScheduleMap out;
  out.total_steps = total_steps;
  out.kind = kind;
  out.exp_slope = exp_slope;
  out.bounds = bounds;
  out.steps = Tensor3(vmap.height, vmap.width, inference_steps);

  // Variance maps usually repeat values (flat regions), so schedules are
  // memoized on the exact variance value.
  std::map<double, std::vector<double>> cache;
  for (int y = 0; y < vmap.height; ++y) {
    for (int x = 0; x < vmap.width; ++x) {
      const double v = vmap.at(y, x);
      auto it = cache.find(v);
      if (it == cache.end()) {
        const auto projected = project_params(v, bounds);
        SamplerParams params;
        params.total_steps = total_steps;
        params.inference_steps = inference_steps;
        params.power = projected.power;
        params.transition_fraction = projected.transition_fraction;
        params.kind = kind;
        params.exp_slope = exp_slope;
        it = cache.emplace(v, build_tds_schedule(params).steps).first;
      }
      std::copy(it->second.begin(), it->second.end(),
                out.steps.data.begin() + static_cast<std::ptrdiff_t>(out.steps.offset(y, x)));
    }
  }
  return out;
}

Raster spatial_timestep_at(const SpatialScheduleMap& map, int k) {
  if (k < 1 || k > map.inference_steps()) {
    throw std::out_of_range("iteration index " + std::to_string(k) + " outside [1, " +
                            std::to_string(map.inference_steps()) + "]");
  }
  Raster out(map.width(), map.height());
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      out.at(y, x) = map.steps.at(y, x, k - 1);
    }
  }
  return out;
}

Raster quantized_timestep_at(const SpatialScheduleMap& map, int k) {
  Raster out = spatial_timestep_at(map, k);
  for (double& v : out.values) v = static_cast<double>(std::lround(v));
  return out;
}

VarianceMap resize_variance_to_grid(const VarianceMap& vmap, int width, int height) {
  if (width < 1 || height < 1) throw std::invalid_argument("grid dimensions must be >= 1");
  if (vmap.empty()) throw std::invalid_argument("empty variance map");
  if (width == vmap.width && height == vmap.height) return vmap;

  auto source_coord = [](int dst, int dst_len, int src_len) {
    if (dst_len == 1) return 0.5 * (src_len - 1);
    return static_cast<double>(dst) * (src_len - 1) / (dst_len - 1);
  };

  VarianceMap out(width, height);
  for (int y = 0; y < height; ++y) {
    const double sy = source_coord(y, height, vmap.height);
    const int y0 = std::min(static_cast<int>(std::floor(sy)), vmap.height - 1);
    const int y1 = std::min(y0 + 1, vmap.height - 1);
    const double fy = sy - y0;
    for (int x = 0; x < width; ++x) {
      const double sx = source_coord(x, width, vmap.width);
      const int x0 = std::min(static_cast<int>(std::floor(sx)), vmap.width - 1);
      const int x1 = std::min(x0 + 1, vmap.width - 1);
      const double fx = sx - x0;
      const double top = (1.0 - fx) * vmap.at(y0, x0) + fx * vmap.at(y0, x1);
      const double bottom = (1.0 - fx) * vmap.at(y1, x0) + fx * vmap.at(y1, x1);
      out.at(y, x) = std::clamp((1.0 - fy) * top + fy * bottom, 0.0, 1.0);
    }
  }
  return out;
}

}  // namespace tss
