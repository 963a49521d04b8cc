// Command-line front end: schedule, variance, spatial-schedule, embed,
// analyze and simulate. Exit codes: 0 success, 1 I/O failure, 2 usage error.

#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tss/freq_analysis.hpp"
#include "tss/io/image_io.hpp"
#include "tss/io/npy.hpp"
#include "tss/io/serialization.hpp"
#include "tss/schedule_core.hpp"
#include "tss/spatial_schedule.hpp"
#include "tss/time_embedding.hpp"
#include "tss/toy_diffusion.hpp"
#include "tss/variance_map.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;

struct GlobalOptions {
  std::uint64_t seed = 0;
  bool seed_given = false;
  fs::path out = ".";
  bool force = false;
};

/// Resolves output paths under --out and refuses to clobber without --force.
class OutputSet {
 public:
  explicit OutputSet(const GlobalOptions& opts) : opts_(opts) {}

  fs::path claim(const std::string& name) {
    paths_.push_back(opts_.out / name);
    return paths_.back();
  }

  void prepare() const {
    std::error_code ec;
    fs::create_directories(opts_.out, ec);
    if (ec) throw tss::io::IoError("cannot create " + opts_.out.string() + ": " + ec.message());
    if (opts_.force) return;
    for (const auto& p : paths_) {
      if (fs::exists(p)) {
        throw tss::io::IoError(p.string() + " exists (pass --force to overwrite)");
      }
    }
  }

 private:
  const GlobalOptions& opts_;
  std::vector<fs::path> paths_;
};

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("tss");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* level = std::getenv("TSS_LOG");
  spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += tss::io::format_number(values[i]);
  }
  return out;
}

tss::ProjectionBounds resolve_bounds(const std::string& preset, std::optional<double> n_min,
                                     std::optional<double> n_max, std::optional<double> a_min,
                                     std::optional<double> a_max) {
  tss::ProjectionBounds bounds;
  if (!preset.empty()) bounds = tss::ProjectionBounds::from_preset(tss::load_preset(preset));
  if (n_min) bounds.n_min = *n_min;
  if (n_max) bounds.n_max = *n_max;
  if (a_min) bounds.a_min = *a_min;
  if (a_max) bounds.a_max = *a_max;
  bounds.validate();
  return bounds;
}

// ---- schedule --------------------------------------------------------------

struct ScheduleArgs {
  std::string preset;
  std::string kind = "polynomial";
  std::optional<double> n;
  std::optional<double> a_frac;
  int steps = 20;
  int total = 1000;
  double exp_slope = 0.004;
};

int run_schedule(const ScheduleArgs& args, const GlobalOptions& opts) {
  tss::SamplerParams params;
  params.total_steps = args.total;
  params.inference_steps = args.steps;
  params.kind = tss::parse_resample_kind(args.kind);
  params.exp_slope = args.exp_slope;
  if (!args.preset.empty()) {
    const auto preset = tss::load_preset(args.preset);
    params.power = preset.n_mid();
    params.transition_fraction = preset.a_mid();
  }
  if (args.n) params.power = *args.n;
  if (args.a_frac) params.transition_fraction = *args.a_frac;

  const tss::Schedule schedule = tss::build_tds_schedule(params);

  OutputSet outputs(opts);
  const auto json_path = outputs.claim("schedule.json");
  const auto csv_path = outputs.claim("schedule.csv");
  outputs.prepare();
  tss::io::write_file(json_path, tss::io::schedule_to_json(schedule).dump(2) + "\n");
  tss::io::write_file(csv_path, tss::io::schedule_to_csv(schedule));

  const auto uniform = tss::uniform_schedule(params.total_steps, params.inference_steps);
  fmt::print("kind: {}  T={}  T'={}  n={}  a_frac={}\n", tss::to_string(params.kind),
             params.total_steps, params.inference_steps, params.power,
             params.transition_fraction);
  fmt::print("steps: [{}]\n", join(schedule.steps));
  fmt::print("early/late steps (t <= 0.2T or t >= 0.8T): {} of {} (uniform: {})\n",
             tss::count_extreme_steps(schedule.steps, params.total_steps), schedule.size(),
             tss::count_extreme_steps(uniform.steps, params.total_steps));
  return 0;
}

// ---- variance --------------------------------------------------------------

struct VarianceArgs {
  fs::path input;
  int window = tss::kDefaultVarianceWindow;
  std::optional<double> sigma;
};

int run_variance(const VarianceArgs& args, const GlobalOptions& opts) {
  const tss::ImageRaster image = tss::io::read_image(args.input);
  const tss::VarianceMap vmap = tss::variance_map(image, args.window, args.sigma);

  OutputSet outputs(opts);
  const auto npy_path = outputs.claim("variance.npy");
  const auto png_path = outputs.claim("variance.png");
  outputs.prepare();
  tss::io::write_variance_npy(vmap, npy_path);
  tss::io::write_png_gray(png_path, vmap);

  double mean = 0.0;
  for (double v : vmap.values) mean += v;
  fmt::print("variance map {}x{}  mean={}\n", vmap.width, vmap.height,
             mean / static_cast<double>(vmap.size()));
  return 0;
}

// ---- spatial-schedule ------------------------------------------------------

struct SpatialArgs {
  fs::path input;
  std::string preset;
  std::optional<double> n_min, n_max, a_min, a_max;
  std::string kind = "polynomial";
  int total = 1000;
  int steps = 20;
  std::optional<int> grid_width, grid_height;
  int window = tss::kDefaultVarianceWindow;
  std::optional<double> sigma;
};

int run_spatial(const SpatialArgs& args, const GlobalOptions& opts) {
  const auto bounds = resolve_bounds(args.preset, args.n_min, args.n_max, args.a_min, args.a_max);
  const auto kind = tss::parse_resample_kind(args.kind);
  const tss::ImageRaster image = tss::io::read_image(args.input);
  const tss::VarianceMap vmap = tss::variance_map(image, args.window, args.sigma);
  const tss::VarianceMap grid = tss::resize_variance_to_grid(
      vmap, args.grid_width.value_or(vmap.width), args.grid_height.value_or(vmap.height));
  const auto map = tss::build_spatial_schedule(grid, bounds, args.total, args.steps, kind);

  OutputSet outputs(opts);
  const auto npy_path = outputs.claim("spatial_schedule.npy");
  const auto sidecar_path = outputs.claim("spatial_schedule.json");
  outputs.prepare();
  tss::io::write_spatial_schedule(map, npy_path, sidecar_path);
  fmt::print("spatial schedule {}x{}x{}  n in [{}, {}]  a in [{}, {}]\n", map.height(),
             map.width(), map.inference_steps(), bounds.n_min, bounds.n_max, bounds.a_min,
             bounds.a_max);
  return 0;
}

// ---- embed -----------------------------------------------------------------

struct EmbedArgs {
  fs::path map;
  std::optional<fs::path> sidecar;
  int k = 1;
  int dim = 320;
  double max_period = tss::kDefaultMaxPeriod;
};

int run_embed(const EmbedArgs& args, const GlobalOptions& opts) {
  std::optional<fs::path> sidecar = args.sidecar;
  if (!sidecar) {
    auto guess = args.map;
    guess.replace_extension(".json");
    if (fs::exists(guess)) sidecar = guess;
  }
  const auto map = tss::io::read_spatial_schedule(args.map, sidecar);
  const tss::Raster timesteps = tss::spatial_timestep_at(map, args.k);
  const tss::EmbeddingMap emap = tss::build_embedding_map(timesteps, args.dim, args.max_period);

  OutputSet outputs(opts);
  const auto path = outputs.claim("embedding.npy");
  outputs.prepare();
  tss::io::write_embedding_map(emap, path);
  fmt::print("embedding map {}x{}x{} for iteration {}\n", emap.height, emap.width, emap.depth,
             args.k);
  return 0;
}

// ---- analyze ---------------------------------------------------------------

struct AnalyzeArgs {
  std::optional<fs::path> frames;
  std::optional<fs::path> stack;
  std::optional<fs::path> labels;
  double low_cut = 1.0 / 3.0;
  double high_cut = 2.0 / 3.0;
  int patch = 128;
};

int run_analyze(const AnalyzeArgs& args, const GlobalOptions& opts) {
  const tss::BandPartition partition{args.low_cut, args.high_cut};
  partition.validate();
  if (args.frames.has_value() == args.stack.has_value()) {
    throw std::invalid_argument("pass exactly one of --frames or --stack");
  }

  tss::Trajectory traj;
  if (args.frames) {
    traj = tss::io::read_frame_directory(*args.frames);
  } else {
    std::optional<fs::path> labels = args.labels;
    if (!labels) {
      auto guess = *args.stack;
      guess.replace_extension(".json");
      if (fs::exists(guess)) labels = guess;
    }
    traj = tss::io::read_trajectory_stack(*args.stack, labels);
  }
  try {
    traj.validate();
  } catch (const std::invalid_argument& e) {
    throw tss::io::IoError(std::string("malformed trajectory: ") + e.what());
  }

  const auto& ref = traj.reference();
  const auto masks = tss::band_masks(ref.width, ref.height, partition);
  const auto report = tss::analyze_trajectory(traj, masks);

  OutputSet outputs(opts);
  const auto band_path = outputs.claim("band_snr.csv");
  const auto delta_path = outputs.claim("noise_delta.csv");
  const bool stratify = ref.width >= args.patch && ref.height >= args.patch;
  const auto strat_path = outputs.claim("stratified_snr.csv");
  outputs.prepare();

  tss::io::write_file(band_path, tss::io::band_report_csv(report));
  std::string delta_csv = "step,band,noise_power,delta_noise\n";
  for (const auto& r : report.rows) {
    delta_csv += fmt::format("{},{},{},{}\n", tss::io::format_number(r.step),
                             tss::to_string(r.band), tss::io::format_number(r.noise_power),
                             tss::io::format_number(r.delta_noise));
  }
  tss::io::write_file(delta_path, delta_csv);

  if (stratify) {
    const auto classes = tss::classify_patches(ref, args.patch);
    const auto rows = tss::stratified_band_snr(traj, classes, args.patch, partition);
    tss::io::write_file(strat_path, tss::io::stratified_csv(rows));
  } else {
    spdlog::warn("frames are smaller than one {}px patch; stratified report is empty", args.patch);
    tss::io::write_file(strat_path, tss::io::kStratifiedCsvHeader + "\n");
  }
  fmt::print("analyzed {} frames ({}x{}), {} band rows\n", traj.frames.size(), ref.width,
             ref.height, report.rows.size());
  return 0;
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
  fs::path config;
};

int run_simulate(const SimulateArgs& args, const GlobalOptions& opts) {
  const std::string text = tss::io::read_file(args.config);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  tss::ExperimentConfig config = tss::io::experiment_config_from_json(j);
  if (opts.seed_given) config.seed = opts.seed;

  spdlog::info("simulating T={} T'={} preset={} blur={}", config.total_steps,
               config.inference_steps, config.preset, config.blur);
  const auto result = tss::run_comparison(config);

  OutputSet outputs(opts);
  const auto csv_path = outputs.claim("comparison.csv");
  const auto config_path = outputs.claim("config_used.json");
  std::vector<std::pair<fs::path, fs::path>> traj_paths;
  for (const auto& s : result.strategies) {
    traj_paths.emplace_back(outputs.claim("trajectory_" + s.strategy + ".npy"),
                            outputs.claim("trajectory_" + s.strategy + ".json"));
  }
  outputs.prepare();

  tss::io::write_file(csv_path, tss::io::comparison_csv(result));
  tss::io::write_file(config_path, tss::io::experiment_config_to_json(config).dump(2) + "\n");
  for (std::size_t i = 0; i < result.strategies.size(); ++i) {
    tss::io::write_trajectory_stack(result.strategies[i].trajectory, traj_paths[i].first,
                                    traj_paths[i].second);
  }

  fmt::print("{:<8} {:>6} {:>12} {:>12} {:>12} {:>10}\n", "strategy", "steps", "low dB",
             "medium dB", "high dB", "rms err");
  for (const auto& s : result.strategies) {
    fmt::print("{:<8} {:>6} {:>12.3f} {:>12.3f} {:>12.3f} {:>10.3g}\n", s.strategy, s.steps,
               s.snr_db[0], s.snr_db[1], s.snr_db[2], s.rms_error);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"Time-spatial-aware timestep scheduling and analysis toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions opts;
  app.add_option("--seed", opts.seed, "Seed for all randomness")->each([&](const std::string&) {
    opts.seed_given = true;
  });
  app.add_option("--out", opts.out, "Output directory");
  app.add_flag("--force", opts.force, "Overwrite existing output files");

  ScheduleArgs schedule_args;
  auto* schedule = app.add_subcommand("schedule", "Build a uniform or non-uniform schedule");
  schedule->add_option("--preset", schedule_args.preset, "stablesr, pasd or supir (midpoints)");
  schedule->add_option("--kind", schedule_args.kind,
                       "uniform, polynomial, trigonometric or exponential");
  schedule->add_option("--n", schedule_args.n, "Power factor (>= 1)");
  schedule->add_option("--a-frac", schedule_args.a_frac, "Transition point as a fraction of T");
  schedule->add_option("--steps", schedule_args.steps, "Inference steps T'");
  schedule->add_option("--T", schedule_args.total, "Training steps T");
  schedule->add_option("--k", schedule_args.exp_slope, "Exponential slope");

  VarianceArgs variance_args;
  auto* variance = app.add_subcommand("variance", "Compute the normalized local-variance map");
  variance->add_option("--input", variance_args.input, "PNG/PGM/PPM image")->required();
  variance->add_option("--window", variance_args.window, "Odd window size");
  variance->add_option("--sigma", variance_args.sigma, "Blur sigma (default window/6)");

  SpatialArgs spatial_args;
  auto* spatial =
      app.add_subcommand("spatial-schedule", "Build per-pixel schedules from an image");
  spatial->add_option("--input", spatial_args.input, "PNG/PGM/PPM image")->required();
  spatial->add_option("--preset", spatial_args.preset, "stablesr, pasd or supir bounds");
  spatial->add_option("--n-min", spatial_args.n_min);
  spatial->add_option("--n-max", spatial_args.n_max);
  spatial->add_option("--a-min", spatial_args.a_min);
  spatial->add_option("--a-max", spatial_args.a_max);
  spatial->add_option("--kind", spatial_args.kind);
  spatial->add_option("--T", spatial_args.total, "Training steps T");
  spatial->add_option("--steps", spatial_args.steps, "Inference steps T'");
  spatial->add_option("--grid-width", spatial_args.grid_width, "Feature grid width");
  spatial->add_option("--grid-height", spatial_args.grid_height, "Feature grid height");
  spatial->add_option("--window", spatial_args.window);
  spatial->add_option("--sigma", spatial_args.sigma);

  EmbedArgs embed_args;
  auto* embed = app.add_subcommand("embed", "Spatial timestep embedding for one iteration");
  embed->add_option("--map", embed_args.map, "spatial_schedule.npy")->required();
  embed->add_option("--sidecar", embed_args.sidecar, "JSON sidecar (default: next to --map)");
  embed->add_option("--k", embed_args.k, "Iteration index in [1, T']")->required();
  embed->add_option("--dim", embed_args.dim, "Embedding width C (even)");
  embed->add_option("--max-period", embed_args.max_period);

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "Band SNR and noise-delta reports");
  analyze->add_option("--frames", analyze_args.frames, "Directory of frame_<t>.png");
  analyze->add_option("--stack", analyze_args.stack, "(N, H, W) NPY stack");
  analyze->add_option("--labels", analyze_args.labels, "JSON {\"timesteps\": [...]}");
  analyze->add_option("--low-cut", analyze_args.low_cut, "Low band cutoff (fraction of Nyquist)");
  analyze->add_option("--high-cut", analyze_args.high_cut, "High band cutoff");
  analyze->add_option("--patch", analyze_args.patch, "Patch size for stratification");

  SimulateArgs simulate_args;
  auto* simulate = app.add_subcommand("simulate", "Uniform vs TDS vs TSS on the toy process");
  simulate->add_option("--config", simulate_args.config, "Experiment JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*schedule) return run_schedule(schedule_args, opts);
    if (*variance) return run_variance(variance_args, opts);
    if (*spatial) return run_spatial(spatial_args, opts);
    if (*embed) return run_embed(embed_args, opts);
    if (*analyze) return run_analyze(analyze_args, opts);
    if (*simulate) return run_simulate(simulate_args, opts);
  } catch (const tss::io::IoError& e) {
    spdlog::error("{}", e.what());
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitIo;
  }
  return kExitUsage;
}
