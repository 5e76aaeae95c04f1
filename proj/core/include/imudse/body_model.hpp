#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "imudse/rotation.hpp"

namespace imudse {

inline constexpr int kSmplJointCount = 24;
inline constexpr int kSmplVertexCount = 6890;

/// A mesh vertex rigidly attached to the joint that actuates it.
struct VertexAttachment {
    int vertex_id = 0;
    int joint_id = 0;
    Vec3 rest_offset = Vec3::Zero(); ///< meters, in the joint's local frame
};

/// Kinematic tree in topological order: parents[0] == -1 and parents[j] < j.
struct Skeleton {
    std::vector<int> parents;
    std::vector<Vec3> rest_offsets; ///< offset from the parent joint, meters
    std::vector<VertexAttachment> tracked_vertices;

    [[nodiscard]] std::size_t joint_count() const noexcept { return parents.size(); }

    /// Throws ValidationError when the tree or an attachment is malformed.
    void validate() const;

    /// Looks up the tracked attachment for a mesh vertex; throws when absent.
    [[nodiscard]] const VertexAttachment& attachment_for_vertex(int vertex_id) const;
};

/// 24-joint SMPL parent layout with synthetic rest offsets (y up, +x to the
/// body's left), tracking the vertices of the 25 basic sensor positions.
Skeleton default_smpl_skeleton();

Skeleton load_skeleton(const std::filesystem::path& path);
void save_skeleton(const Skeleton& skeleton, const std::filesystem::path& path);

struct Pose {
    std::vector<Vec3> local_rotations; ///< axis-angle per joint, radians
    Vec3 root_translation = Vec3::Zero();

    static Pose rest(std::size_t joint_count);
};

struct FKResult {
    std::vector<Mat3> global_rotations;
    std::vector<Vec3> global_positions;
};

/// Throws ValidationError if the pose does not match the skeleton.
FKResult forward_kinematics(const Skeleton& skeleton, const Pose& pose);

/// p(joint) + R(joint) * rest_offset. Throws ValidationError on a bad joint id.
Vec3 vertex_position(const FKResult& fk, const VertexAttachment& attachment);

} // namespace imudse
