#include "imudse/imu_synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "imudse/error.hpp"
#include "imudse/seeding.hpp"
#include "json_util.hpp"

namespace imudse {

using detail::json;

void SynthesisParams::validate() const
{
    if (smoothing_span < 1)
        throw ValidationError("synthesis.smoothing_span: must be >= 1");
    if (!(noise.sigma_ori >= 0.0) || !(noise.sigma_acc >= 0.0))
        throw ValidationError("synthesis.noise: standard deviations must be >= 0");
}

VirtualIMUSequence VirtualIMUSequence::select(std::span<const int> ids) const
{
    std::vector<std::size_t> cols;
    cols.reserve(ids.size());
    for (int id : ids) {
        auto it = std::find(sensor_ids.begin(), sensor_ids.end(), id);
        if (it == sensor_ids.end())
            throw ValidationError(fmt::format("IMU sequence has no sensor {}", id));
        cols.push_back(static_cast<std::size_t>(it - sensor_ids.begin()));
    }
    VirtualIMUSequence out;
    out.fps = fps;
    out.sensor_ids.assign(ids.begin(), ids.end());
    out.orientations.resize(frame_count());
    out.accelerations.resize(frame_count());
    for (std::size_t t = 0; t < frame_count(); ++t) {
        out.orientations[t].reserve(cols.size());
        out.accelerations[t].reserve(cols.size());
        for (std::size_t c : cols) {
            out.orientations[t].push_back(orientations[t][c]);
            out.accelerations[t].push_back(accelerations[t][c]);
        }
    }
    return out;
}

namespace {

void check_attachments(const Skeleton& skeleton, std::span<const SensorAttachment> attachments)
{
    for (const auto& a : attachments) {
        if (a.vertex.joint_id < 0 || static_cast<std::size_t>(a.vertex.joint_id) >= skeleton.joint_count())
            throw ValidationError(fmt::format("sensor {}: attachment joint {} is not in the skeleton", a.sensor_id,
                                              a.vertex.joint_id));
    }
}

} // namespace

std::vector<std::vector<Mat3>> synthesize_orientations(const MotionSequence& motion, const Skeleton& skeleton,
                                                       std::span<const SensorAttachment> attachments)
{
    check_attachments(skeleton, attachments);
    std::vector<std::vector<Mat3>> out(motion.frames.size());
    for (std::size_t t = 0; t < motion.frames.size(); ++t) {
        const FKResult fk = forward_kinematics(skeleton, motion.frames[t]);
        out[t].reserve(attachments.size());
        for (const auto& a : attachments)
            out[t].push_back(fk.global_rotations[static_cast<std::size_t>(a.vertex.joint_id)]);
    }
    return out;
}

std::vector<std::vector<Vec3>> vertex_trajectories(const MotionSequence& motion, const Skeleton& skeleton,
                                                   std::span<const SensorAttachment> attachments)
{
    check_attachments(skeleton, attachments);
    std::vector<std::vector<Vec3>> out(motion.frames.size());
    for (std::size_t t = 0; t < motion.frames.size(); ++t) {
        const FKResult fk = forward_kinematics(skeleton, motion.frames[t]);
        out[t].reserve(attachments.size());
        for (const auto& a : attachments)
            out[t].push_back(vertex_position(fk, a.vertex));
    }
    return out;
}

std::vector<Vec3> synthesize_accelerations(std::span<const Vec3> trajectory, double fps, int n)
{
    if (n < 1)
        throw ValidationError("acceleration synthesis: smoothing span must be >= 1");
    const auto span = static_cast<std::size_t>(n);
    if (trajectory.size() < 2 * span + 1)
        throw ValidationError(fmt::format("acceleration synthesis: {} frames is too short for span {} (need {})",
                                          trajectory.size(), n, 2 * span + 1));
    const double scale = fps * fps / static_cast<double>(n * n);
    std::vector<Vec3> out;
    out.reserve(trajectory.size() - 2 * span);
    for (std::size_t t = span; t + span < trajectory.size(); ++t)
        out.push_back((trajectory[t + span] - 2.0 * trajectory[t] + trajectory[t - span]) * scale);
    return out;
}

VirtualIMUSequence add_noise(const VirtualIMUSequence& imu, const NoiseSpec& noise)
{
    if (!(noise.sigma_ori >= 0.0) || !(noise.sigma_acc >= 0.0))
        throw ValidationError("noise: standard deviations must be >= 0");
    VirtualIMUSequence out = imu;
    if (noise.sigma_ori == 0.0 && noise.sigma_acc == 0.0)
        return out;

    for (std::size_t s = 0; s < imu.sensor_count(); ++s) {
        Rng rng(hash_combine(noise.seed, static_cast<std::uint64_t>(static_cast<std::int64_t>(imu.sensor_ids[s]))));
        for (std::size_t t = 0; t < imu.frame_count(); ++t) {
            if (noise.sigma_ori > 0.0) {
                const double z = 2.0 * rng.uniform() - 1.0;
                const double phi = 2.0 * std::numbers::pi * rng.uniform();
                const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
                const Vec3 axis(r * std::cos(phi), r * std::sin(phi), z);
                const double angle = noise.sigma_ori * rng.normal();
                out.orientations[t][s] = axis_angle_to_matrix(axis * angle) * imu.orientations[t][s];
            }
            if (noise.sigma_acc > 0.0) {
                for (int k = 0; k < 3; ++k)
                    out.accelerations[t][s][k] += noise.sigma_acc * rng.normal();
            }
        }
    }
    return out;
}

VirtualIMUSequence normalize_root_relative(const VirtualIMUSequence& imu, int root_sensor_id)
{
    auto it = std::find(imu.sensor_ids.begin(), imu.sensor_ids.end(), root_sensor_id);
    if (it == imu.sensor_ids.end())
        throw ValidationError(fmt::format("root-relative features: root sensor {} is not present", root_sensor_id));
    const auto root = static_cast<std::size_t>(it - imu.sensor_ids.begin());

    VirtualIMUSequence out = imu;
    for (std::size_t t = 0; t < imu.frame_count(); ++t) {
        const Mat3 root_inv = imu.orientations[t][root].transpose();
        const Vec3& root_acc = imu.accelerations[t][root];
        for (std::size_t s = 0; s < imu.sensor_count(); ++s) {
            if (s == root)
                continue;
            out.orientations[t][s] = root_inv * imu.orientations[t][s];
            out.accelerations[t][s] = root_inv * (imu.accelerations[t][s] - root_acc);
        }
    }
    return out;
}

VirtualIMUSequence synthesize_clean(const MotionSequence& motion, const Skeleton& skeleton,
                                    std::span<const SensorAttachment> attachments, const SynthesisParams& params)
{
    params.validate();
    motion.validate();
    const auto n = static_cast<std::size_t>(params.smoothing_span);
    const std::size_t frames = motion.frames.size();
    if (frames < 2 * n + 1)
        throw ValidationError(fmt::format("motion '{}': {} frames is too short for smoothing span {}", motion.name,
                                          frames, params.smoothing_span));
    check_attachments(skeleton, attachments);

    std::vector<std::vector<Mat3>> ori(frames);
    std::vector<std::vector<Vec3>> pos(frames);
    for (std::size_t t = 0; t < frames; ++t) {
        const FKResult fk = forward_kinematics(skeleton, motion.frames[t]);
        for (const auto& a : attachments) {
            ori[t].push_back(fk.global_rotations[static_cast<std::size_t>(a.vertex.joint_id)]);
            pos[t].push_back(vertex_position(fk, a.vertex));
        }
    }

    VirtualIMUSequence imu;
    imu.fps = motion.fps;
    for (const auto& a : attachments)
        imu.sensor_ids.push_back(a.sensor_id);
    const std::size_t out_frames = frames - 2 * n;
    imu.orientations.assign(ori.begin() + static_cast<std::ptrdiff_t>(n),
                            ori.begin() + static_cast<std::ptrdiff_t>(n + out_frames));
    imu.accelerations.assign(out_frames, std::vector<Vec3>(attachments.size()));

    std::vector<Vec3> trajectory(frames);
    for (std::size_t s = 0; s < attachments.size(); ++s) {
        for (std::size_t t = 0; t < frames; ++t)
            trajectory[t] = pos[t][s];
        const auto acc = synthesize_accelerations(trajectory, motion.fps, params.smoothing_span);
        for (std::size_t t = 0; t < out_frames; ++t)
            imu.accelerations[t][s] = params.include_gravity ? Vec3(acc[t] + params.gravity) : acc[t];
    }
    return imu;
}

VirtualIMUSequence synthesize(const MotionSequence& motion, const Skeleton& skeleton,
                              std::span<const SensorAttachment> attachments, const SynthesisParams& params)
{
    return add_noise(synthesize_clean(motion, skeleton, attachments, params), params.noise);
}

void save_imu(const VirtualIMUSequence& imu, const SynthesisParams& params, const std::filesystem::path& path)
{
    json doc;
    doc["fps"] = imu.fps;
    doc["sensor_ids"] = imu.sensor_ids;
    doc["params"] = {
        {"smoothing_span", params.smoothing_span},
        {"include_gravity", params.include_gravity},
        {"gravity", detail::from_vec3(params.gravity)},
        {"root_relative", params.root_relative},
        {"noise", {{"sigma_ori", params.noise.sigma_ori}, {"sigma_acc", params.noise.sigma_acc}, {"seed", params.noise.seed}}},
    };
    json frames = json::array();
    for (std::size_t t = 0; t < imu.frame_count(); ++t) {
        json sensors = json::array();
        for (std::size_t s = 0; s < imu.sensor_count(); ++s) {
            json rec = json::array();
            const Mat3& r = imu.orientations[t][s];
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    rec.push_back(r(i, j));
            for (int k = 0; k < 3; ++k)
                rec.push_back(imu.accelerations[t][s][k]);
            sensors.push_back(std::move(rec));
        }
        frames.push_back(std::move(sensors));
    }
    doc["frames"] = std::move(frames);
    detail::write_json_file(doc, path);
}

VirtualIMUSequence load_imu(const std::filesystem::path& path)
{
    using detail::get_as;
    const auto doc = detail::read_json_file(path);
    const std::string where = path.string();
    VirtualIMUSequence imu;
    imu.fps = get_as<double>(detail::require(doc, "fps", where), where + ".fps");
    for (const auto& id : detail::require(doc, "sensor_ids", where))
        imu.sensor_ids.push_back(get_as<int>(id, where + ".sensor_ids"));
    const auto& frames = detail::require(doc, "frames", where);
    for (std::size_t t = 0; t < frames.size(); ++t) {
        const auto& sensors = frames[t];
        if (sensors.size() != imu.sensor_ids.size())
            throw ValidationError(fmt::format("{}: frame {} has {} sensors, expected {}", where, t, sensors.size(),
                                              imu.sensor_ids.size()));
        std::vector<Mat3> ori;
        std::vector<Vec3> acc;
        for (std::size_t s = 0; s < sensors.size(); ++s) {
            const auto& rec = sensors[s];
            if (!rec.is_array() || rec.size() != 12)
                throw ValidationError(fmt::format("{}: frame {} sensor {}: expected 12 values", where, t, s));
            Mat3 r;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    r(i, j) = get_as<double>(rec[static_cast<std::size_t>(3 * i + j)], where);
            ori.push_back(r);
            acc.emplace_back(get_as<double>(rec[9], where), get_as<double>(rec[10], where), get_as<double>(rec[11], where));
        }
        imu.orientations.push_back(std::move(ori));
        imu.accelerations.push_back(std::move(acc));
    }
    return imu;
}

} // namespace imudse
