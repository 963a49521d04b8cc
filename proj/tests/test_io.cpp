#include <filesystem>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tss/io/image_io.hpp"
#include "tss/io/npy.hpp"
#include "tss/io/serialization.hpp"

using namespace tss;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("tss_io_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("npy round trip") {
  std::mt19937_64 rng(61);
  std::uniform_int_distribution<int> dim(1, 6);
  std::normal_distribution<double> n(0.0, 100.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::size_t> shape(static_cast<std::size_t>(dim(rng) % 4 + 1));
    std::size_t count = 1;
    for (auto& s : shape) count *= (s = static_cast<std::size_t>(dim(rng)));
    std::vector<double> data(count);
    for (double& v : data) v = n(rng);

    const auto f8 = io::decode_npy(io::encode_npy(data, shape, io::DType::Float64));
    CHECK(f8.shape == shape);
    CHECK(f8.dtype == io::DType::Float64);
    CHECK(f8.data == data);

    const std::string bytes = io::encode_npy(data, shape, io::DType::Float32);
    CHECK(bytes.substr(0, 6) == "\x93NUMPY");
    CHECK((10 + static_cast<unsigned char>(bytes[8]) + 256 * static_cast<unsigned char>(bytes[9])) % 64 == 0);
    const auto f4 = io::decode_npy(bytes);
    REQUIRE(f4.data.size() == data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      CHECK(f4.data[i] == static_cast<double>(static_cast<float>(data[i])));
    }
  }
  const std::vector<double> scalar{2.5};
  CHECK(io::decode_npy(io::encode_npy(scalar, {})).shape.empty());

  CHECK_THROWS_AS(io::decode_npy("not an npy file"), io::IoError);
  std::string truncated = io::encode_npy(std::vector<double>(10, 1.0), {10});
  truncated.resize(truncated.size() - 4);
  CHECK_THROWS_AS(io::decode_npy(truncated), io::IoError);
  std::string big_endian = io::encode_npy(std::vector<double>(2, 1.0), {2});
  big_endian.replace(big_endian.find("<f4"), 3, ">f4");
  CHECK_THROWS_AS(io::decode_npy(big_endian), io::IoError);
  std::string fortran = io::encode_npy(std::vector<double>(4, 1.0), {2, 2});
  fortran.replace(fortran.find("False"), 5, "True ");
  CHECK_THROWS_AS(io::decode_npy(fortran), io::IoError);
  CHECK_THROWS_AS(io::read_npy("/nonexistent/file.npy"), io::IoError);
}

TEST_CASE("image read and write") {
  TempDir tmp;
  Raster r(5, 3);
  for (std::size_t i = 0; i < r.size(); ++i) r.values[i] = static_cast<double>(i) / 14.0;

  io::write_png_gray(tmp.path / "a.png", r);
  io::write_pgm(tmp.path / "a.pgm", r);
  for (const char* name : {"a.png", "a.pgm"}) {
    const auto img = io::read_image(tmp.path / name);
    CHECK(img.width == 5);
    CHECK(img.height == 3);
    CHECK(img.channels == 1);
    for (std::size_t i = 0; i < r.size(); ++i) {
      CHECK(img.pixels[i] == std::round(r.values[i] * 255.0) / 255.0);
    }
  }

  io::write_file(tmp.path / "c.ppm", "P3\n2 1\n255\n255 0 0  0 0 255\n");
  const auto color = io::read_image(tmp.path / "c.ppm");
  CHECK(color.channels == 3);
  CHECK(color.pixels == std::vector<double>{1, 0, 0, 0, 0, 1});

  io::write_file(tmp.path / "g.pgm", "P2\n# comment\n2 2\n4\n0 1\n2 4\n");
  CHECK(io::read_image(tmp.path / "g.pgm").pixels == std::vector<double>{0, 0.25, 0.5, 1.0});

  io::write_file(tmp.path / "bad.png", "garbage");
  CHECK_THROWS_AS(io::read_image(tmp.path / "bad.png"), io::IoError);
  CHECK_THROWS_AS(io::read_image(tmp.path / "missing.png"), io::IoError);
}

TEST_CASE("schedule json and csv") {
  SamplerParams p;
  p.total_steps = 1000;
  p.inference_steps = 6;
  p.power = 2.35;
  p.transition_fraction = 0.605;
  p.kind = ResampleKind::Trigonometric;
  const auto s = build_tds_schedule(p);
  const auto j = io::schedule_to_json(s);
  CHECK(j["T"] == 1000);
  CHECK(j["T_prime"] == 6);
  CHECK(j["kind"] == "trigonometric");
  const auto back = io::schedule_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.steps == s.steps);
  CHECK(back.quantized == s.quantized);
  CHECK(back.params.power == p.power);

  const auto csv = io::schedule_to_csv(uniform_schedule(1000, 2));
  CHECK(csv == "index,step_real,step_int\n0,500,500\n1,1000,1000\n");
  CHECK_THROWS_AS(io::schedule_from_json(nlohmann::json::object()), io::IoError);
}

TEST_CASE("spatial schedule and embedding round trip") {
  TempDir tmp;
  std::mt19937_64 rng(62);
  const auto v = oracle::random_raster(6, 4, rng);
  const auto bounds = ProjectionBounds::from_preset(load_preset("pasd"));
  const auto m = build_spatial_schedule(v, bounds, 1000, 5);
  io::write_spatial_schedule(m, tmp.path / "s.npy", tmp.path / "s.json");

  const auto raw = io::read_npy(tmp.path / "s.npy");
  CHECK(raw.shape == std::vector<std::size_t>{4, 6, 5});
  CHECK(raw.dtype == io::DType::Float32);

  const auto back = io::read_spatial_schedule(tmp.path / "s.npy", tmp.path / "s.json");
  CHECK(back.total_steps == 1000);
  CHECK(back.inference_steps() == 5);
  CHECK(back.bounds.n_max == bounds.n_max);
  for (std::size_t i = 0; i < m.steps.data.size(); ++i) {
    CHECK(back.steps.data[i] == static_cast<double>(static_cast<float>(m.steps.data[i])));
  }
  const auto bare = io::read_spatial_schedule(tmp.path / "s.npy", std::nullopt);
  CHECK(bare.inference_steps() == 5);

  const auto emap = build_embedding_map(spatial_timestep_at(m, 2), 8);
  io::write_embedding_map(emap, tmp.path / "e.npy");
  const auto ebak = io::read_embedding_map(tmp.path / "e.npy");
  CHECK(ebak.height == 4);
  CHECK(ebak.width == 6);
  CHECK(ebak.depth == 8);
  CHECK(oracle::max_abs_diff(ebak.data, emap.data) < 1e-6);

  io::write_npy(tmp.path / "flat.npy", std::vector<double>(6, 0.0), {6});
  CHECK_THROWS_AS(io::read_spatial_schedule(tmp.path / "flat.npy", std::nullopt), io::IoError);
}

TEST_CASE("trajectory stack and frame directory") {
  TempDir tmp;
  std::mt19937_64 rng(63);
  Trajectory t;
  for (int i = 0; i < 3; ++i) {
    t.frames.push_back(oracle::random_raster(4, 3, rng));
    t.timesteps.push_back(600 - 300 * i);
  }
  io::write_trajectory_stack(t, tmp.path / "t.npy", tmp.path / "t.json");
  const auto back = io::read_trajectory_stack(tmp.path / "t.npy", tmp.path / "t.json");
  CHECK(back.timesteps == t.timesteps);
  const auto unlabeled = io::read_trajectory_stack(tmp.path / "t.npy", std::nullopt);
  CHECK(unlabeled.timesteps == std::vector<double>{2, 1, 0});
  CHECK(oracle::max_abs_diff(back.frames[1].values, t.frames[1].values) < 1e-6);

  fs::create_directories(tmp.path / "frames");
  for (std::size_t i = 0; i < 3; ++i) {
    io::write_png_gray(tmp.path / "frames" / ("frame_" + std::to_string(static_cast<int>(t.timesteps[i])) + ".png"),
                       t.frames[i]);
  }
  io::write_file(tmp.path / "frames" / "notes.txt", "ignored");
  const auto dir = io::read_frame_directory(tmp.path / "frames");
  CHECK(dir.timesteps == std::vector<double>{600, 300, 0});
  CHECK(dir.frames.size() == 3);
  CHECK_THROWS_AS(io::read_frame_directory(tmp.path / "nope"), io::IoError);
}

TEST_CASE("csv writers") {
  BandSNRReport report;
  report.rows.push_back({800, Band::Low, kInfiniteSnr, 0.0, -0.5});
  const auto csv = io::band_report_csv(report);
  CHECK(csv == io::kBandCsvHeader + "\n800,low,inf,0,-0.5\n");
  CHECK(io::format_number(0.1) == "0.1");
  CHECK(io::format_number(-kInfiniteSnr) == "-inf");
}

TEST_CASE("experiment config parsing is strict") {
  const auto cfg = io::experiment_config_from_json(nlohmann::json::parse(
      R"({"seed": 5, "T": 500, "T_prime": 10, "preset": "pasd", "blur": 2.5, "fixture": "bands",
          "width": 64, "height": 32, "patch": 16, "weights": {"low": 1, "medium": 0, "high": 2},
          "band_cuts": [0.25, 0.75]})"));
  CHECK(cfg.seed == 5);
  CHECK(cfg.total_steps == 500);
  CHECK(cfg.inference_steps == 10);
  CHECK(cfg.preset == "pasd");
  CHECK(cfg.blur == 2.5);
  CHECK(cfg.fixture == "bands");
  CHECK(cfg.height == 32);
  CHECK(cfg.weights.high == 2.0);
  CHECK(cfg.partition.high_cut == 0.75);

  const auto defaults = io::experiment_config_from_json(nlohmann::json::object());
  CHECK(defaults.inference_steps == 7);
  CHECK(io::experiment_config_from_json(io::experiment_config_to_json(cfg)).seed == 5);

  CHECK_THROWS_AS(io::experiment_config_from_json(nlohmann::json::parse(R"({"sede": 1})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(io::experiment_config_from_json(nlohmann::json::parse(R"({"T": "many"})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(io::experiment_config_from_json(nlohmann::json::parse(R"({"weights": {"mid": 1}})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(io::experiment_config_from_json(nlohmann::json::parse("[1, 2]")),
                  std::invalid_argument);
}
