#include "tss/io/serialization.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <regex>
#include <set>
#include <sstream>

#include "tss/io/image_io.hpp"
#include "tss/io/npy.hpp"
#include "tss/variance_map.hpp"

namespace tss::io {

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return fmt::format("{}", v);
}

json schedule_to_json(const Schedule& schedule) {
  const auto& p = schedule.params;
  return json{{"T", p.total_steps},
              {"T_prime", p.inference_steps},
              {"kind", std::string(to_string(p.kind))},
              {"n", p.power},
              {"a_frac", p.transition_fraction},
              {"steps_real", schedule.steps},
              {"steps_int", schedule.quantized}};
}

Schedule schedule_from_json(const json& j) {
  try {
    Schedule s;
    s.params.total_steps = j.at("T").get<int>();
    s.params.inference_steps = j.at("T_prime").get<int>();
    s.params.kind = parse_resample_kind(j.at("kind").get<std::string>());
    s.params.power = j.at("n").get<double>();
    s.params.transition_fraction = j.at("a_frac").get<double>();
    s.steps = j.at("steps_real").get<std::vector<double>>();
    s.quantized = j.at("steps_int").get<std::vector<int>>();
    if (s.steps.size() != s.quantized.size() ||
        s.steps.size() != static_cast<std::size_t>(s.params.inference_steps)) {
      throw IoError("schedule JSON step lists disagree with T_prime");
    }
    return s;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed schedule JSON: ") + e.what());
  }
}

std::string schedule_to_csv(const Schedule& schedule) {
  std::string out = "index,step_real,step_int\n";
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    out += fmt::format("{},{},{}\n", i, format_number(schedule.steps[i]), schedule.quantized[i]);
  }
  return out;
}

json spatial_sidecar(const SpatialScheduleMap& map) {
  return json{{"T", map.total_steps},
              {"T_prime", map.inference_steps()},
              {"height", map.height()},
              {"width", map.width()},
              {"kind", std::string(to_string(map.kind))},
              {"exp_slope", map.exp_slope},
              {"bounds",
               {{"n_min", map.bounds.n_min},
                {"n_max", map.bounds.n_max},
                {"a_min", map.bounds.a_min},
                {"a_max", map.bounds.a_max}}}};
}

void write_spatial_schedule(const SpatialScheduleMap& map, const std::filesystem::path& npy_path,
                            const std::filesystem::path& sidecar_path) {
  write_npy(npy_path, map.steps.data,
            {static_cast<std::size_t>(map.height()), static_cast<std::size_t>(map.width()),
             static_cast<std::size_t>(map.inference_steps())});
  write_file(sidecar_path, spatial_sidecar(map).dump(2) + "\n");
}

SpatialScheduleMap read_spatial_schedule(const std::filesystem::path& npy_path,
                                         const std::optional<std::filesystem::path>& sidecar_path) {
  const NpyArray arr = read_npy(npy_path);
  if (arr.shape.size() != 3) throw IoError(npy_path.string() + ": expected an (H, W, T') array");
  SpatialScheduleMap map;
  map.steps.height = static_cast<int>(arr.shape[0]);
  map.steps.width = static_cast<int>(arr.shape[1]);
  map.steps.depth = static_cast<int>(arr.shape[2]);
  map.steps.data = arr.data;
  if (sidecar_path) {
    try {
      const json j = json::parse(read_file(*sidecar_path));
      map.total_steps = j.at("T").get<int>();
      map.kind = parse_resample_kind(j.at("kind").get<std::string>());
      map.exp_slope = j.value("exp_slope", 0.004);
      const auto& b = j.at("bounds");
      map.bounds = {b.at("n_min").get<double>(), b.at("n_max").get<double>(),
                    b.at("a_min").get<double>(), b.at("a_max").get<double>()};
      if (j.at("T_prime").get<int>() != map.inference_steps()) {
        throw IoError(sidecar_path->string() + ": T_prime disagrees with the tensor");
      }
    } catch (const json::exception& e) {
      throw IoError(sidecar_path->string() + ": " + e.what());
    }
  } else {
    double max_t = 0.0;
    for (double v : map.steps.data) max_t = std::max(max_t, v);
    map.total_steps = static_cast<int>(std::ceil(max_t));
  }
  return map;
}

void write_embedding_map(const EmbeddingMap& emap, const std::filesystem::path& path) {
  write_npy(path, emap.data,
            {static_cast<std::size_t>(emap.height), static_cast<std::size_t>(emap.width),
             static_cast<std::size_t>(emap.depth)});
}

EmbeddingMap read_embedding_map(const std::filesystem::path& path) {
  const NpyArray arr = read_npy(path);
  if (arr.shape.size() != 3) throw IoError(path.string() + ": expected an (H, W, C) array");
  EmbeddingMap out;
  out.height = static_cast<int>(arr.shape[0]);
  out.width = static_cast<int>(arr.shape[1]);
  out.depth = static_cast<int>(arr.shape[2]);
  out.data = arr.data;
  return out;
}

void write_variance_npy(const VarianceMap& vmap, const std::filesystem::path& path) {
  write_npy(path, vmap.values,
            {static_cast<std::size_t>(vmap.height), static_cast<std::size_t>(vmap.width)});
}

void write_trajectory_stack(const Trajectory& traj, const std::filesystem::path& npy_path,
                            const std::filesystem::path& sidecar_path) {
  traj.validate();
  const Raster& first = traj.frames.front();
  std::vector<double> flat;
  flat.reserve(traj.frames.size() * first.size());
  for (const auto& f : traj.frames) flat.insert(flat.end(), f.values.begin(), f.values.end());
  write_npy(npy_path, flat,
            {traj.frames.size(), static_cast<std::size_t>(first.height),
             static_cast<std::size_t>(first.width)});
  write_file(sidecar_path, json{{"timesteps", traj.timesteps}}.dump() + "\n");
}

Trajectory read_trajectory_stack(const std::filesystem::path& npy_path,
                                 const std::optional<std::filesystem::path>& sidecar_path) {
  const NpyArray arr = read_npy(npy_path);
  if (arr.shape.size() != 3) throw IoError(npy_path.string() + ": expected an (N, H, W) stack");
  const std::size_t n = arr.shape[0];
  const int h = static_cast<int>(arr.shape[1]);
  const int w = static_cast<int>(arr.shape[2]);
  Trajectory traj;
  const std::size_t frame_size = static_cast<std::size_t>(h) * w;
  for (std::size_t i = 0; i < n; ++i) {
    Raster r(w, h);
    std::copy_n(arr.data.begin() + static_cast<std::ptrdiff_t>(i * frame_size), frame_size,
                r.values.begin());
    traj.frames.push_back(std::move(r));
  }
  if (sidecar_path) {
    try {
      traj.timesteps = json::parse(read_file(*sidecar_path)).at("timesteps").get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw IoError(sidecar_path->string() + ": " + e.what());
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) traj.timesteps.push_back(static_cast<double>(n - 1 - i));
  }
  if (traj.timesteps.size() != n) throw IoError("trajectory labels do not match frame count");
  return traj;
}

Trajectory read_frame_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
  static const std::regex pattern(R"(frame_(\d+(?:\.\d+)?)\.png)");
  std::vector<std::pair<double, std::filesystem::path>> entries;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && std::regex_match(name, m, pattern)) {
      entries.emplace_back(std::stod(m[1].str()), entry.path());
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  Trajectory traj;
  for (const auto& [t, path] : entries) {
    const ImageRaster img = read_image(path);
    traj.frames.push_back(to_grayscale(img).to_raster());
    traj.timesteps.push_back(t);
  }
  return traj;
}

std::string band_report_csv(const BandSNRReport& report) {
  std::string out = kBandCsvHeader + "\n";
  for (const auto& r : report.rows) {
    out += fmt::format("{},{},{},{},{}\n", format_number(r.step), to_string(r.band),
                       format_number(r.snr_db), format_number(r.noise_power),
                       format_number(r.delta_noise));
  }
  return out;
}

std::string stratified_csv(const std::vector<StratifiedRow>& rows) {
  std::string out = kStratifiedCsvHeader + "\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{}\n", to_string(r.label), format_number(r.step),
                       to_string(r.band), format_number(r.snr_db), format_number(r.noise_power),
                       format_number(r.delta_noise));
  }
  return out;
}

std::string comparison_csv(const ComparisonResult& result) {
  std::string out = kComparisonCsvHeader + "\n";
  for (const auto& s : result.strategies) {
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", s.strategy, s.steps,
                       format_number(s.snr_db[0]), format_number(s.snr_db[1]),
                       format_number(s.snr_db[2]), format_number(s.class_high_snr_db[0]),
                       format_number(s.class_high_snr_db[1]),
                       format_number(s.class_high_snr_db[2]), format_number(s.rms_error));
  }
  return out;
}

ExperimentConfig experiment_config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("experiment config must be a JSON object");
  static const std::set<std::string> known{"seed",  "T",     "T_prime", "preset",  "blur",
                                           "fixture", "width", "height",  "patch", "weights",
                                           "band_cuts"};
  for (const auto& item : j.items()) {
    if (!known.contains(item.key())) {
      throw std::invalid_argument("unknown config key '" + item.key() + "'");
    }
  }
  ExperimentConfig c;
  try {
    c.seed = j.value("seed", c.seed);
    c.total_steps = j.value("T", c.total_steps);
    c.inference_steps = j.value("T_prime", c.inference_steps);
    c.preset = j.value("preset", c.preset);
    c.blur = j.value("blur", c.blur);
    c.fixture = j.value("fixture", c.fixture);
    c.width = j.value("width", c.width);
    c.height = j.value("height", c.height);
    c.patch = j.value("patch", c.patch);
    if (j.contains("weights")) {
      const auto& w = j.at("weights");
      for (const auto& item : w.items()) {
        if (item.key() != "low" && item.key() != "medium" && item.key() != "high") {
          throw std::invalid_argument("unknown weights key '" + item.key() + "'");
        }
      }
      c.weights = {w.value("low", c.weights.low), w.value("medium", c.weights.medium),
                   w.value("high", c.weights.high)};
    }
    if (j.contains("band_cuts")) {
      const auto cuts = j.at("band_cuts").get<std::vector<double>>();
      if (cuts.size() != 2) throw std::invalid_argument("band_cuts must hold two values");
      c.partition = {cuts[0], cuts[1]};
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

json experiment_config_to_json(const ExperimentConfig& c) {
  return json{{"seed", c.seed},
              {"T", c.total_steps},
              {"T_prime", c.inference_steps},
              {"preset", c.preset},
              {"blur", c.blur},
              {"fixture", c.fixture},
              {"width", c.width},
              {"height", c.height},
              {"patch", c.patch},
              {"weights", {{"low", c.weights.low}, {"medium", c.weights.medium}, {"high", c.weights.high}}},
              {"band_cuts", {c.partition.low_cut, c.partition.high_cut}}};
}

}  // namespace tss::io
