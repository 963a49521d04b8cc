#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tss/spatial_schedule.hpp"

using namespace tss;

namespace {

std::vector<double> tds_steps(double n, double a, int T, int Tp,
                              ResampleKind kind = ResampleKind::Polynomial) {
  SamplerParams p;
  p.total_steps = T;
  p.inference_steps = Tp;
  p.power = n;
  p.transition_fraction = a;
  p.kind = kind;
  return build_tds_schedule(p).steps;
}

std::vector<double> slice_vec(const SpatialScheduleMap& m, int y, int x) {
  const auto s = m.slice(y, x);
  return {s.begin(), s.end()};
}

}  // namespace

TEST_CASE("project_params endpoints and midpoint") {
  const auto supir = ProjectionBounds::from_preset(load_preset("supir"));
  auto p = project_params(0.0, supir);
  CHECK(p.power == 2.2);
  CHECK(p.transition_fraction == 0.58);
  p = project_params(1.0, supir);
  CHECK(p.power == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(p.transition_fraction == doctest::Approx(0.63).epsilon(1e-15));
  const auto pasd = ProjectionBounds::from_preset(load_preset("pasd"));
  p = project_params(0.5, pasd);
  CHECK(p.power == 1.5);
  CHECK(p.transition_fraction == doctest::Approx(0.5));
  CHECK_THROWS_AS(project_params(1.01, pasd), std::invalid_argument);
  CHECK_THROWS_AS(project_params(-0.1, pasd), std::invalid_argument);
}

TEST_CASE("ProjectionBounds validation") {
  CHECK_THROWS_AS((ProjectionBounds{2.0, 1.0, 0.4, 0.6}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ProjectionBounds{0.5, 1.0, 0.4, 0.6}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ProjectionBounds{1.0, 2.0, 0.7, 0.6}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ProjectionBounds{1.0, 2.0, 0.4, 1.2}.validate()), std::invalid_argument);
}

TEST_CASE("build_spatial_schedule examples") {
  const auto pasd = ProjectionBounds::from_preset(load_preset("pasd"));
  SUBCASE("zero map uses the (n_min, a_min) schedule everywhere") {
    const auto m = build_spatial_schedule(Raster(5, 4, 0.0), pasd, 1000, 10);
    const auto expected = tds_steps(pasd.n_min, pasd.a_min, 1000, 10);
    for (int y = 0; y < 4; ++y) {
      for (int x = 0; x < 5; ++x) CHECK(slice_vec(m, y, x) == expected);
    }
  }
  SUBCASE("two-pixel map carries both endpoint schedules") {
    Raster v(2, 1);
    v.values = {0.0, 1.0};
    const auto m = build_spatial_schedule(v, pasd, 1000, 12);
    CHECK(slice_vec(m, 0, 0) == tds_steps(pasd.n_min, pasd.a_min, 1000, 12));
    CHECK(slice_vec(m, 0, 1) == tds_steps(pasd.n_max, pasd.a_max, 1000, 12));
  }
  SUBCASE("random 8x8 map matches the per-pixel oracle") {
    std::mt19937_64 rng(21);
    const auto v = oracle::random_raster(8, 8, rng);
    const auto supir = ProjectionBounds::from_preset(load_preset("supir"));
    const auto m = build_spatial_schedule(v, supir, 1000, 20);
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 8; ++x) {
        const double val = v.at(y, x);
        SamplerParams p;
        p.total_steps = 1000;
        p.inference_steps = 20;
        p.power = val * (supir.n_max - supir.n_min) + supir.n_min;
        p.transition_fraction = val * (supir.a_max - supir.a_min) + supir.a_min;
        CHECK(oracle::max_abs_diff(slice_vec(m, y, x), oracle::schedule(p)) < 1e-9);
      }
    }
  }
}

TEST_CASE("spatial_timestep_at examples") {
  std::mt19937_64 rng(22);
  const auto v = oracle::random_raster(6, 5, rng);
  const auto bounds = ProjectionBounds::from_preset(load_preset("supir"));
  const auto m = build_spatial_schedule(v, bounds, 1000, 9);
  for (double t : spatial_timestep_at(m, 9).values) CHECK(t == 1000.0);

  const auto flat = build_spatial_schedule(Raster(6, 5, 0.3), bounds, 1000, 9);
  const auto r = spatial_timestep_at(flat, 4);
  for (double t : r.values) CHECK(t == r.values.front());

  for (int k = 1; k <= 9; ++k) {
    const auto raster = spatial_timestep_at(m, k);
    for (int y = 0; y < 5; ++y) {
      for (int x = 0; x < 6; ++x) CHECK(raster.at(y, x) == m.steps.data[(y * 6 + x) * 9 + k - 1]);
    }
  }
  CHECK_THROWS_AS(spatial_timestep_at(m, 0), std::out_of_range);
  CHECK_THROWS_AS(spatial_timestep_at(m, 10), std::out_of_range);
}

TEST_CASE("resize_variance_to_grid examples") {
  std::mt19937_64 rng(23);
  const auto v = oracle::random_raster(9, 7, rng);
  CHECK(resize_variance_to_grid(v, 9, 7) == v);

  for (double val : resize_variance_to_grid(Raster(10, 10, 0.25), 3, 17).values) {
    CHECK(val == doctest::Approx(0.25).epsilon(1e-15));
  }

  Raster ramp(64, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 64; ++x) ramp.at(y, x) = x / 63.0;
  }
  const auto half = resize_variance_to_grid(ramp, 32, 2);
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 32; ++x) CHECK(std::abs(half.at(y, x) - x / 31.0) < 1e-6);
  }
  CHECK(half.at(0, 0) == 0.0);
  CHECK(std::abs(half.at(0, 31) - 1.0) < 1e-6);
  CHECK_THROWS_AS(resize_variance_to_grid(v, 0, 3), std::invalid_argument);
}

TEST_CASE("property: per-pixel slices ascending and bounded") {
  std::mt19937_64 rng(24);
  for (auto kind : {ResampleKind::Polynomial, ResampleKind::Trigonometric,
                    ResampleKind::Exponential, ResampleKind::Uniform}) {
    const auto v = oracle::random_raster(12, 10, rng);
    const auto m = build_spatial_schedule(v, ProjectionBounds::from_preset(load_preset("pasd")),
                                          1000, 15, kind);
    for (int y = 0; y < 10; ++y) {
      for (int x = 0; x < 12; ++x) {
        const auto s = m.slice(y, x);
        for (std::size_t i = 0; i < s.size(); ++i) {
          CHECK(s[i] >= 0.0);
          CHECK(s[i] <= 1000.0);
          if (i) CHECK(s[i - 1] <= s[i]);
        }
      }
    }
  }
}

TEST_CASE("property: higher variance never places fewer steps at the extremes") {
  for (const char* name : {"pasd", "supir", "stablesr"}) {
    const auto bounds = ProjectionBounds::from_preset(load_preset(name));
    Raster v(3, 1);
    v.values = {0.0, 0.5, 1.0};
    const auto m = build_spatial_schedule(v, bounds, 1000, 20);
    int prev = -1;
    for (int x = 0; x < 3; ++x) {
      const int c = count_extreme_steps(slice_vec(m, 0, x), 1000);
      CHECK(c >= prev);
      prev = c;
    }
  }
}

TEST_CASE("property: equal bounds degenerate to the global TDS schedule") {
  std::mt19937_64 rng(25);
  const ProjectionBounds equal{2.3, 2.3, 0.6, 0.6};
  const auto v = oracle::random_raster(16, 16, rng);
  const auto m = build_spatial_schedule(v, equal, 1000, 20);
  const auto global = tds_steps(2.3, 0.6, 1000, 20);
  double worst = 0.0;
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) worst = std::max(worst, oracle::max_abs_diff(slice_vec(m, y, x), global));
  }
  CHECK(worst == 0.0);
}
