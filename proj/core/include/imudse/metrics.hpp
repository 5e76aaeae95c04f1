#pragma once

#include <array>
#include <span>
#include <string>

#include "imudse/body_model.hpp"

namespace imudse {

/// Thighs and upper arms in SMPL joint numbering.
inline constexpr std::array<int, 4> kSipJoints = {1, 2, 16, 17};

struct PoseErrorReport {
    double sip_deg = 0.0;
    double angular_deg = 0.0;
    double positional_cm = 0.0;
    double mesh_cm = 0.0;
    double jitter_km_s3 = 0.0;
};

enum class Metric { sip, angular, positional, mesh, jitter };

inline constexpr std::array<Metric, 5> kAllMetrics = {Metric::sip, Metric::angular, Metric::positional, Metric::mesh,
                                                      Metric::jitter};

const char* to_string(Metric metric) noexcept;
/// Accepts the short names and the results-file column names (e.g. mesh_cm).
/// Throws ValidationError listing the valid names.
Metric parse_metric(const std::string& name);
double metric_value(const PoseErrorReport& report, Metric metric) noexcept;

// All pairwise metrics take equally long sequences and throw ValidationError
// otherwise. Means run over frames and the relevant joints or vertices.

double sip_error(std::span<const Pose> pred, std::span<const Pose> gt, const Skeleton& skeleton);
double angular_error(std::span<const Pose> pred, std::span<const Pose> gt, const Skeleton& skeleton);

/// Per frame, the prediction is translated so its root joint coincides with
/// the ground-truth root; no rotational alignment.
double positional_error(std::span<const Pose> pred, std::span<const Pose> gt, const Skeleton& skeleton);
/// Root-aligned like positional_error, over skeleton.tracked_vertices.
double mesh_error(std::span<const Pose> pred, std::span<const Pose> gt, const Skeleton& skeleton);

/// Mean norm of (p(t+2) - 3 p(t+1) + 3 p(t) - p(t-1)) * fps^3 over joints and
/// frames t in [1, T-2), in km/s^3. Needs at least 4 frames.
double jitter(std::span<const Pose> pred, const Skeleton& skeleton, double fps);

PoseErrorReport evaluate(std::span<const Pose> pred, std::span<const Pose> gt, const Skeleton& skeleton, double fps);

} // namespace imudse
