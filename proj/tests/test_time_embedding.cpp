#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tss/time_embedding.hpp"

using namespace tss;

namespace {

Tensor3 random_tensor(int h, int w, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Tensor3 t(h, w, c);
  for (double& v : t.data) v = n(rng);
  return t;
}

}  // namespace

TEST_CASE("sinusoidal_embed examples") {
  const auto zero = sinusoidal_embed(0.0, 8);
  for (int i = 0; i < 4; ++i) {
    CHECK(zero[i] == 0.0);
    CHECK(zero[4 + i] == 1.0);
  }
  const auto e = sinusoidal_embed(1.0, 4);
  CHECK(e[0] == doctest::Approx(std::sin(1.0)).epsilon(1e-15));
  CHECK(e[1] == doctest::Approx(std::sin(0.01)).epsilon(1e-12));
  CHECK(e[2] == doctest::Approx(std::cos(1.0)).epsilon(1e-15));
  CHECK(e[3] == doctest::Approx(std::cos(0.01)).epsilon(1e-12));

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> t(0.0, 1000.0);
  for (int i = 0; i < 50; ++i) {
    for (double v : sinusoidal_embed(t(rng), 64)) CHECK((v >= -1.0 && v <= 1.0));
  }
  CHECK_THROWS_AS(sinusoidal_embed(1.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(sinusoidal_embed(1.0, 0), std::invalid_argument);
}

TEST_CASE("inject_unified examples") {
  const auto out = inject_unified(Tensor3(3, 2, 4, 0.0), 0.0, 4);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 2; ++x) {
      CHECK(out.at(y, x, 0) == 0.0);
      CHECK(out.at(y, x, 1) == 0.0);
      CHECK(out.at(y, x, 2) == 1.0);
      CHECK(out.at(y, x, 3) == 1.0);
    }
  }

  std::mt19937_64 rng(32);
  const auto z = random_tensor(5, 4, 6, rng);
  const auto shifted = inject_unified(z, 417.0, 6);
  for (int c = 0; c < 6; ++c) {
    const double d0 = shifted.at(0, 0, c) - z.at(0, 0, c);
    for (int y = 0; y < 5; ++y) {
      for (int x = 0; x < 4; ++x) {
        CHECK(shifted.at(y, x, c) - z.at(y, x, c) == doctest::Approx(d0).epsilon(1e-12));
      }
    }
  }
  CHECK(inject_spatial(z, build_embedding_map(Raster(4, 5, 417.0), 6)) == shifted);
  CHECK_THROWS_AS(inject_unified(z, 1.0, 8), std::invalid_argument);
}

TEST_CASE("build_embedding_map examples") {
  const auto flat = build_embedding_map(Raster(3, 3, 250.0), 8);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 3; ++x) {
      for (int c = 0; c < 8; ++c) CHECK(flat.at(y, x, c) == flat.at(0, 0, c));
    }
  }

  Raster two(4, 2);
  two.values = {10, 10, 900, 10, 900, 900, 10, 10};
  const auto m = build_embedding_map(two, 8);
  std::vector<std::vector<double>> distinct;
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 4; ++x) {
      std::vector<double> v(m.data.begin() + m.offset(y, x), m.data.begin() + m.offset(y, x) + 8);
      if (std::find(distinct.begin(), distinct.end(), v) == distinct.end()) distinct.push_back(v);
    }
  }
  CHECK(distinct.size() == 2);

  std::mt19937_64 rng(33);
  const auto r = oracle::random_raster(7, 5, rng, 0.0, 1000.0);
  const auto rm = build_embedding_map(r, 16);
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 7; ++x) {
      const double t = r.at(y, x);
      for (int i = 0; i < 8; ++i) {
        const double w = std::pow(10000.0, -2.0 * i / 16.0);
        CHECK(std::abs(rm.at(y, x, i) - std::sin(t * w)) < 1e-12);
        CHECK(std::abs(rm.at(y, x, 8 + i) - std::cos(t * w)) < 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(build_embedding_map(r, 3), std::invalid_argument);
}

TEST_CASE("inject_spatial examples") {
  std::mt19937_64 rng(34);
  const auto z = random_tensor(4, 3, 6, rng);
  CHECK(inject_spatial(z, Tensor3(4, 3, 6, 0.0)) == z);

  const auto emap = random_tensor(4, 3, 6, rng);
  const auto out = inject_spatial(z, emap);
  for (std::size_t i = 0; i < z.data.size(); ++i) CHECK(out.data[i] == z.data[i] + emap.data[i]);
  CHECK_THROWS_AS(inject_spatial(z, Tensor3(4, 3, 8)), std::invalid_argument);
}

TEST_CASE("property: linearity and locality of spatial injection") {
  std::mt19937_64 rng(35);
  const auto z1 = random_tensor(6, 6, 8, rng);
  const auto z2 = random_tensor(6, 6, 8, rng);
  const auto ts = oracle::random_raster(6, 6, rng, 0.0, 1000.0);
  const auto m = build_embedding_map(ts, 8);

  Tensor3 sum = z1;
  for (std::size_t i = 0; i < sum.data.size(); ++i) sum.data[i] += z2.data[i];
  const auto lhs = inject_spatial(sum, m);
  const auto rhs = inject_spatial(z1, m);
  for (std::size_t i = 0; i < lhs.data.size(); ++i) {
    CHECK(lhs.data[i] == doctest::Approx(rhs.data[i] + z2.data[i]).epsilon(1e-12));
  }

  Raster changed = ts;
  changed.at(2, 3) += 137.0;
  const auto a = inject_spatial(z1, m);
  const auto b = inject_spatial(z1, build_embedding_map(changed, 8));
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 6; ++x) {
      bool same = true;
      for (int c = 0; c < 8; ++c) same = same && a.at(y, x, c) == b.at(y, x, c);
      CHECK(same == !(y == 2 && x == 3));
    }
  }
}
