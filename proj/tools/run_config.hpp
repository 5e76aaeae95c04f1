#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "imudse/config_space.hpp"
#include "imudse/dse_engine.hpp"
#include "imudse/imu_synthesis.hpp"
#include "imudse/motion_data.hpp"
#include "imudse/pose_estimator.hpp"

namespace imudse::cli {

/// Environment variable naming the output directory when the config has none.
inline constexpr const char* kOutputDirEnv = "IMUDSE_OUTPUT_DIR";

/// One run configuration document. Relative paths are resolved against the
/// directory containing the config file.
struct RunConfig {
    std::filesystem::path source;
    std::optional<std::filesystem::path> dataset_dir;
    std::optional<std::filesystem::path> skeleton_file;
    std::optional<std::filesystem::path> sensor_table_file;
    std::filesystem::path output_dir;
    std::optional<std::vector<int>> sensors; ///< restricts the sensor table
    SplitRule split;
    Constraints constraints;
    SynthesisParams synthesis;
    EstimatorSpec estimator;
    std::uint64_t seed = 0;
    std::vector<double> lambdas = lambda_grid(0.0, 1.0, 0.05);
    int workers = 1;
    bool record_runtime = false;
    std::size_t report_k = 5;
};

/// Parses and validates a config file. Errors name the offending field by
/// its path in the document (e.g. "constraints.max_sensors").
RunConfig load_run_config(const std::filesystem::path& path);

Skeleton load_config_skeleton(const RunConfig& config);
SensorTable load_config_table(const RunConfig& config);

/// Loads the dataset and assembles a plan. Requires paths.dataset_dir.
DSEPlan make_plan(const RunConfig& config);

} // namespace imudse::cli
