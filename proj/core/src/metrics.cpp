#include "imudse/metrics.hpp"

#include <vector>

#include <fmt/format.h>

#include "imudse/error.hpp"

namespace imudse {

const char* to_string(Metric metric) noexcept
{
    switch (metric) {
    case Metric::sip:
        return "sip";
    case Metric::angular:
        return "angular";
    case Metric::positional:
        return "positional";
    case Metric::mesh:
        return "mesh";
    case Metric::jitter:
        return "jitter";
    }
    return "unknown";
}

Metric parse_metric(const std::string& name)
{
    if (name == "sip" || name == "sip_deg")
        return Metric::sip;
    if (name == "angular" || name == "angular_deg")
        return Metric::angular;
    if (name == "positional" || name == "positional_cm")
        return Metric::positional;
    if (name == "mesh" || name == "mesh_cm")
        return Metric::mesh;
    if (name == "jitter" || name == "jitter_km_s3")
        return Metric::jitter;
    throw ValidationError(fmt::format("unknown metric '{}' (valid: sip, angular, positional, mesh, jitter)", name));
}

double metric_value(const PoseErrorReport& report, Metric metric) noexcept
{
    switch (metric) {
    case Metric::sip:
        return report.sip_deg;
    case Metric::angular:
        return report.angular_deg;
    case Metric::positional:
        return report.positional_cm;
    case Metric::mesh:
        return report.mesh_cm;
    case Metric::jitter:
        return report.jitter_km_s3;
    }
    return 0.0;
}

namespace {

void check_pair(std::span<const Pose> pred, std::span<const Pose> gt)
{
    if (pred.size() != gt.size())
        throw ValidationError(fmt::format("metric: prediction has {} frames, ground truth {}", pred.size(), gt.size()));
    if (pred.empty())
        throw ValidationError("metric: empty sequences");
}

template <typename PerFrame>
double mean_over_frames(std::span<const Pose> pred, std::span<const Pose> gt, const Skeleton& skeleton, PerFrame&& f)
{
    check_pair(pred, gt);
    double total = 0.0;
    for (std::size_t t = 0; t < pred.size(); ++t)
        total += f(forward_kinematics(skeleton, pred[t]), forward_kinematics(skeleton, gt[t]));
    return total / static_cast<double>(pred.size());
}

double mean_angle(const FKResult& p, const FKResult& g, std::span<const int> joints)
{
    double sum = 0.0;
    for (int j : joints) {
        const auto k = static_cast<std::size_t>(j);
        sum += geodesic_angle_deg(p.global_rotations[k], g.global_rotations[k]);
    }
    return sum / static_cast<double>(joints.size());
}

} // namespace

double sip_error(std::span<const Pose> pred, std::span<const Pose> gt, const Skeleton& skeleton)
{
    for (int j : kSipJoints) {
        if (static_cast<std::size_t>(j) >= skeleton.joint_count())
            throw ValidationError(fmt::format("sip error: skeleton has no joint {}", j));
    }
    return mean_over_frames(pred, gt, skeleton,
                            [](const FKResult& p, const FKResult& g) { return mean_angle(p, g, kSipJoints); });
}

double angular_error(std::span<const Pose> pred, std::span<const Pose> gt, const Skeleton& skeleton)
{
    std::vector<int> joints(skeleton.joint_count());
    for (std::size_t j = 0; j < joints.size(); ++j)
        joints[j] = static_cast<int>(j);
    return mean_over_frames(pred, gt, skeleton,
                            [&](const FKResult& p, const FKResult& g) { return mean_angle(p, g, joints); });
}

double positional_error(std::span<const Pose> pred, std::span<const Pose> gt, const Skeleton& skeleton)
{
    return 100.0 * mean_over_frames(pred, gt, skeleton, [](const FKResult& p, const FKResult& g) {
               const Vec3 shift = g.global_positions[0] - p.global_positions[0];
               double sum = 0.0;
               for (std::size_t j = 0; j < p.global_positions.size(); ++j)
                   sum += (p.global_positions[j] + shift - g.global_positions[j]).norm();
               return sum / static_cast<double>(p.global_positions.size());
           });
}

double mesh_error(std::span<const Pose> pred, std::span<const Pose> gt, const Skeleton& skeleton)
{
    if (skeleton.tracked_vertices.empty())
        throw ValidationError("mesh error: the skeleton tracks no vertices");
    return 100.0 * mean_over_frames(pred, gt, skeleton, [&](const FKResult& p, const FKResult& g) {
               const Vec3 shift = g.global_positions[0] - p.global_positions[0];
               double sum = 0.0;
               for (const auto& v : skeleton.tracked_vertices)
                   sum += (vertex_position(p, v) + shift - vertex_position(g, v)).norm();
               return sum / static_cast<double>(skeleton.tracked_vertices.size());
           });
}

double jitter(std::span<const Pose> pred, const Skeleton& skeleton, double fps)
{
    if (pred.size() < 4)
        throw ValidationError(fmt::format("jitter: needs at least 4 frames, got {}", pred.size()));
    if (!(fps > 0.0))
        throw ValidationError("jitter: fps must be > 0");
    std::vector<std::vector<Vec3>> pos;
    pos.reserve(pred.size());
    for (const auto& pose : pred)
        pos.push_back(forward_kinematics(skeleton, pose).global_positions);

    const double scale = fps * fps * fps;
    const std::size_t joints = skeleton.joint_count();
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t t = 1; t + 2 < pred.size(); ++t) {
        for (std::size_t j = 0; j < joints; ++j) {
            const Vec3 d = (pos[t + 2][j] - pos[t - 1][j]) - 3.0 * (pos[t + 1][j] - pos[t][j]);
            sum += (d * scale).norm();
            ++count;
        }
    }
    return sum / static_cast<double>(count) / 1000.0;
}

PoseErrorReport evaluate(std::span<const Pose> pred, std::span<const Pose> gt, const Skeleton& skeleton, double fps)
{
    PoseErrorReport r;
    r.sip_deg = sip_error(pred, gt, skeleton);
    r.angular_deg = angular_error(pred, gt, skeleton);
    r.positional_cm = positional_error(pred, gt, skeleton);
    r.mesh_cm = mesh_error(pred, gt, skeleton);
    r.jitter_km_s3 = jitter(pred, skeleton, fps);
    return r;
}

} // namespace imudse
