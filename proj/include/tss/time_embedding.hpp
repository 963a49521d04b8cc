#pragma once

#include <vector>

#include "tss/raster.hpp"

namespace tss {

using EmbeddingVector = std::vector<double>;
/// H x W x C per-location embeddings.
using EmbeddingMap = Tensor3;
/// Main-branch features z, H x W x C.
using FeatureTensor = Tensor3;

inline constexpr double kDefaultMaxPeriod = 10000.0;

/// Sinusoidal embedding laid out as [sin(t w_0) .. sin(t w_{C/2-1}),
/// cos(t w_0) .. cos(t w_{C/2-1})] with w_i = max_period^(-2i/C).
EmbeddingVector sinusoidal_embed(double t, int dim, double max_period = kDefaultMaxPeriod);

/// Adds one embedding of `t` at every spatial location of `z`.
FeatureTensor inject_unified(const FeatureTensor& z, double t, int dim,
                             double max_period = kDefaultMaxPeriod);

/// Embeds each location's own timestep.
EmbeddingMap build_embedding_map(const Raster& timesteps, int dim,
                                 double max_period = kDefaultMaxPeriod);

/// Elementwise z + emap.
FeatureTensor inject_spatial(const FeatureTensor& z, const EmbeddingMap& emap);

}  // namespace tss
