#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "imudse/dse_engine.hpp"

namespace imudse {

inline constexpr const char* kResultsHeader =
    "config_id,sensor_ids,count,sip_deg,angular_deg,positional_cm,mesh_cm,jitter_km_s3,runtime_s,valid";

/// Sensor ids are space separated inside their field; invalid records carry
/// "nan" metrics and valid = 0.
std::string format_results_csv(const std::vector<EvaluationRecord>& records);
std::vector<EvaluationRecord> parse_results_csv(const std::string& text, const std::string& source = "<memory>");
std::vector<EvaluationRecord> load_results_csv(const std::filesystem::path& path);

std::string format_ranking_csv(const std::vector<RankEntry>& ranking, Metric metric, double lambda);
std::string format_best_per_count_csv(const std::vector<CountBest>& best, Metric metric);
std::string format_occurrence_csv(const OccurrenceTable& table, Metric metric);
std::string format_pareto_csv(const std::vector<ParetoEntry>& front, Metric metric);
std::string format_lambda_sweep_csv(const std::vector<std::pair<Metric, std::vector<SweepPoint>>>& sweeps);

/// Creates parent directories; throws RuntimeFailure on I/O errors.
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

} // namespace imudse
