#include "tss/time_embedding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tss {

namespace {

void require_even_dim(int dim) {
  if (dim < 2 || dim % 2 != 0) {
    throw std::invalid_argument("embedding dim must be even and >= 2, got " +
                                std::to_string(dim));
  }
}

}  // namespace

EmbeddingVector sinusoidal_embed(double t, int dim, double max_period) {
  require_even_dim(dim);
  if (!std::isfinite(t)) throw std::invalid_argument("timestep must be finite");
  const int half = dim / 2;
  EmbeddingVector out(dim);
  for (int i = 0; i < half; ++i) {
    const double freq = std::pow(max_period, -2.0 * i / dim);
    out[i] = std::sin(t * freq);
    out[half + i] = std::cos(t * freq);
  }
  return out;
}

FeatureTensor inject_unified(const FeatureTensor& z, double t, int dim, double max_period) {
  if (z.depth != dim) {
    throw std::invalid_argument("feature channels " + std::to_string(z.depth) +
                                " do not match embedding dim " + std::to_string(dim));
  }
  const EmbeddingVector emb = sinusoidal_embed(t, dim, max_period);
  FeatureTensor out = z;
  for (std::size_t base = 0; base < out.data.size(); base += dim) {
    for (int c = 0; c < dim; ++c) out.data[base + c] += emb[c];
  }
  return out;
}

EmbeddingMap build_embedding_map(const Raster& timesteps, int dim, double max_period) {
  require_even_dim(dim);
  EmbeddingMap out(timesteps.height, timesteps.width, dim);
  for (int y = 0; y < timesteps.height; ++y) {
    for (int x = 0; x < timesteps.width; ++x) {
      const EmbeddingVector emb = sinusoidal_embed(timesteps.at(y, x), dim, max_period);
      std::copy(emb.begin(), emb.end(),
                out.data.begin() + static_cast<std::ptrdiff_t>(out.offset(y, x)));
    }
  }
  return out;
}

FeatureTensor inject_spatial(const FeatureTensor& z, const EmbeddingMap& emap) {
  if (!z.same_shape(emap)) {
    throw std::invalid_argument("feature tensor and embedding map shapes differ");
  }
  FeatureTensor out = z;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += emap.data[i];
  return out;
}

}  // namespace tss
