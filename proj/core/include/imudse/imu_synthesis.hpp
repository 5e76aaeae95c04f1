#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "imudse/body_model.hpp"
#include "imudse/motion_data.hpp"

namespace imudse {

/// Orientation and acceleration streams, indexed [frame][sensor].
struct VirtualIMUSequence {
    double fps = 60.0;
    std::vector<int> sensor_ids;
    std::vector<std::vector<Mat3>> orientations;
    std::vector<std::vector<Vec3>> accelerations; ///< m/s^2

    [[nodiscard]] std::size_t frame_count() const noexcept { return orientations.size(); }
    [[nodiscard]] std::size_t sensor_count() const noexcept { return sensor_ids.size(); }

    /// Keeps the listed sensors in the given order. Throws on an unknown id.
    [[nodiscard]] VirtualIMUSequence select(std::span<const int> ids) const;
};

struct NoiseSpec {
    double sigma_ori = 0.05; ///< radians
    double sigma_acc = 0.2;  ///< m/s^2
    std::uint64_t seed = 0;
};

struct SynthesisParams {
    int smoothing_span = 4; ///< n, frames
    bool include_gravity = true;
    Vec3 gravity{0.0, -9.81, 0.0};
    NoiseSpec noise;
    bool root_relative = true;

    void validate() const;
};

/// A sensor placed on the body: its id and the vertex it rides on.
struct SensorAttachment {
    int sensor_id = 0;
    VertexAttachment vertex;
};

/// Global rotation of each attached joint, all frames. [frame][sensor].
std::vector<std::vector<Mat3>> synthesize_orientations(const MotionSequence& motion, const Skeleton& skeleton,
                                                       std::span<const SensorAttachment> attachments);

/// Vertex positions for all frames. [frame][sensor].
std::vector<std::vector<Vec3>> vertex_trajectories(const MotionSequence& motion, const Skeleton& skeleton,
                                                   std::span<const SensorAttachment> attachments);

/// (p(t+n) - 2 p(t) + p(t-n)) * fps^2 / n^2 for t in [n, T-n). No gravity.
std::vector<Vec3> synthesize_accelerations(std::span<const Vec3> trajectory, double fps, int n);

/// Premultiplies each orientation by exp(angle * axis) with a uniform axis and
/// angle ~ N(0, sigma_ori), and adds N(0, sigma_acc^2) per acceleration
/// component. Each sensor draws from its own stream keyed by (seed, sensor id),
/// so the noise on a sensor does not depend on which other sensors are present.
VirtualIMUSequence add_noise(const VirtualIMUSequence& imu, const NoiseSpec& noise);

/// Root-relative features: R_root^T R_s and R_root^T (a_s - a_root) for
/// every non-root sensor; the root keeps its own R and a.
VirtualIMUSequence normalize_root_relative(const VirtualIMUSequence& imu, int root_sensor_id);

/// FK -> orientations and vertex trajectories -> accelerations -> gravity ->
/// noise. Output covers source frames [n, T - n).
VirtualIMUSequence synthesize(const MotionSequence& motion, const Skeleton& skeleton,
                              std::span<const SensorAttachment> attachments, const SynthesisParams& params);

/// Same as synthesize() without the noise stage.
VirtualIMUSequence synthesize_clean(const MotionSequence& motion, const Skeleton& skeleton,
                                    std::span<const SensorAttachment> attachments, const SynthesisParams& params);

void save_imu(const VirtualIMUSequence& imu, const SynthesisParams& params, const std::filesystem::path& path);
VirtualIMUSequence load_imu(const std::filesystem::path& path);

} // namespace imudse
