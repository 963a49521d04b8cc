#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "tss/freq_analysis.hpp"
#include "tss/schedule_core.hpp"
#include "tss/spatial_schedule.hpp"
#include "tss/time_embedding.hpp"
#include "tss/toy_diffusion.hpp"

namespace tss::io {

using nlohmann::json;

/// Shortest round-trip decimal form; infinities print as "inf".
std::string format_number(double v);

// Schedule: {"T", "T_prime", "kind", "n", "a_frac", "steps_real", "steps_int"}
// and CSV "index,step_real,step_int".
json schedule_to_json(const Schedule& schedule);
Schedule schedule_from_json(const json& j);
std::string schedule_to_csv(const Schedule& schedule);

// Spatial schedule: (H, W, T') float32 NPY plus a JSON sidecar.
json spatial_sidecar(const SpatialScheduleMap& map);
void write_spatial_schedule(const SpatialScheduleMap& map, const std::filesystem::path& npy_path,
                            const std::filesystem::path& sidecar_path);
/// Loads the tensor; metadata comes from the sidecar when one is given.
SpatialScheduleMap read_spatial_schedule(const std::filesystem::path& npy_path,
                                         const std::optional<std::filesystem::path>& sidecar_path);

void write_embedding_map(const EmbeddingMap& emap, const std::filesystem::path& path);
EmbeddingMap read_embedding_map(const std::filesystem::path& path);

void write_variance_npy(const VarianceMap& vmap, const std::filesystem::path& path);

// Trajectory as an (N, H, W) float32 stack; labels live in a sidecar
// {"timesteps": [...]}.
void write_trajectory_stack(const Trajectory& traj, const std::filesystem::path& npy_path,
                            const std::filesystem::path& sidecar_path);
/// Without labels the frames are numbered N-1 down to 0.
Trajectory read_trajectory_stack(const std::filesystem::path& npy_path,
                                 const std::optional<std::filesystem::path>& sidecar_path);
/// Frames named frame_<timestep>.png, ordered by descending timestep.
Trajectory read_frame_directory(const std::filesystem::path& dir);

inline const std::string kBandCsvHeader = "step,band,snr_db,noise_power,delta_noise";
inline const std::string kStratifiedCsvHeader = "class,step,band,snr_db,noise_power,delta_noise";
inline const std::string kComparisonCsvHeader =
    "strategy,steps,snr_low_db,snr_medium_db,snr_high_db,snr_high_smooth_db,snr_high_medium_db,"
    "snr_high_textured_db,rms_error";

std::string band_report_csv(const BandSNRReport& report);
std::string stratified_csv(const std::vector<StratifiedRow>& rows);
std::string comparison_csv(const ComparisonResult& result);

/// Strict parse: unknown keys and wrong types are rejected with std::invalid_argument.
ExperimentConfig experiment_config_from_json(const json& j);
json experiment_config_to_json(const ExperimentConfig& config);

}  // namespace tss::io
