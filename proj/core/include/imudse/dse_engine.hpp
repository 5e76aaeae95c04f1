#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "imudse/body_model.hpp"
#include "imudse/config_space.hpp"
#include "imudse/imu_synthesis.hpp"
#include "imudse/metrics.hpp"
#include "imudse/motion_data.hpp"
#include "imudse/pose_estimator.hpp"

namespace imudse {

/// M_i(lambda) = e (1 - lambda) + lambda i. Throws ValidationError for
/// lambda outside [0, 1] or a negative error.
double combined_metric(double error, int sensor_count, double lambda);

/// Factor bringing a metric to the scale of sensor counts before it enters
/// the combined metric: 0.1 for jitter, 1 otherwise. Raw stored metrics are
/// never scaled.
double combined_metric_scale(Metric metric) noexcept;

/// 0, step, 2 step, ... up to and including `stop` (within 1e-9).
std::vector<double> lambda_grid(double start, double stop, double step);

struct DSEPlan {
    Dataset dataset;
    std::string dataset_source; ///< recorded in the manifest
    Skeleton skeleton;
    std::string skeleton_source = "default";
    SensorTable table;
    std::string table_source = "default";
    Constraints constraints;
    SynthesisParams synthesis;
    EstimatorSpec estimator;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir; ///< empty: nothing is written
    std::vector<double> lambdas = lambda_grid(0.0, 1.0, 0.05);
    int workers = 1;
    /// When false, runtime_s is written as 0 so results files are
    /// reproducible byte for byte; measured times go to timings.csv.
    bool record_runtime = false;

    void validate() const;
};

struct EvaluationRecord {
    int config_id = 0;
    SensorConfiguration config;
    PoseErrorReport report;
    double runtime_s = 0.0;
    bool valid = true;
    std::string message; ///< failure reason for invalid records

    [[nodiscard]] int sensor_count() const noexcept { return static_cast<int>(config.count()); }
};

struct ResultStore {
    std::vector<EvaluationRecord> records; ///< ordered by (count, ids)
};

/// Evaluates every enumerated configuration. Estimator failures produce an
/// invalid record instead of aborting. Output is independent of `workers`.
/// Throws ValidationError for an empty enumeration or missing train/test data.
ResultStore run_dse(const DSEPlan& plan);

struct RankEntry {
    int config_id = 0;
    SensorConfiguration config;
    double error = 0.0; ///< scaled by combined_metric_scale
    double score = 0.0;
};

/// Valid records ascending by combined metric; ties go to fewer sensors,
/// then lexicographically smaller ids.
std::vector<RankEntry> rank(const std::vector<EvaluationRecord>& records, Metric metric, double lambda);

struct CountBest {
    int count = 0;
    std::vector<RankEntry> best; ///< raw error, score unused
    double min_error = 0.0;
    double max_error = 0.0;
};

/// For each sensor count, the k lowest-error valid configurations.
std::vector<CountBest> best_per_count(const std::vector<EvaluationRecord>& records, Metric metric, std::size_t k);

struct OccurrenceRow {
    std::vector<int> sensor_ids; ///< one sensor or a symmetric pair
    int best_count = 0;
    int worst_count = 0;

    [[nodiscard]] std::string label() const;
};

struct OccurrenceTable {
    std::vector<OccurrenceRow> rows; ///< ordered by smallest sensor id
    int best_total = 0;
    int worst_total = 0;

    [[nodiscard]] const OccurrenceRow& row_for(int sensor_id) const;
};

/// Counts, per table row, the configurations containing it; a pair counts
/// once per configuration.
OccurrenceTable count_occurrences(const std::vector<SensorConfiguration>& best,
                                  const std::vector<SensorConfiguration>& worst, const SensorTable& table);

/// Per sensor count, the k best and k worst valid configurations by metric,
/// partitioned so no configuration is both; counts are summed over levels.
OccurrenceTable occurrence_analysis(const std::vector<EvaluationRecord>& records, Metric metric, std::size_t k,
                                    const SensorTable& table);

struct ParetoEntry {
    int config_id = 0;
    SensorConfiguration config;
    double error = 0.0;
};

/// Valid records not dominated in (count, error), ordered by (count, ids).
std::vector<ParetoEntry> pareto_front(const std::vector<EvaluationRecord>& records, Metric metric);

struct SweepPoint {
    double lambda = 0.0;
    int count = 0;
    SensorConfiguration config;
    double error = 0.0; ///< scaled
    double score = 0.0;
};

/// M_i(lambda) over the grid for the most accurate configuration of each count.
std::vector<SweepPoint> lambda_sweep(const std::vector<EvaluationRecord>& records, Metric metric,
                                     const std::vector<double>& lambdas);

/// Writes results.csv, manifest.json and (when timing is off) timings.csv.
void write_run_outputs(const DSEPlan& plan, const ResultStore& store);

/// Writes best_per_count_<metric>.csv, pareto_<metric>.csv,
/// occurrences_<metric>.csv, ranking_<metric>.csv (lambda 0.5) for every
/// metric plus lambda_sweep.csv.
void write_reports(const std::vector<EvaluationRecord>& records, const SensorTable& table,
                   const std::vector<double>& lambdas, std::size_t k, const std::filesystem::path& dir);

} // namespace imudse
