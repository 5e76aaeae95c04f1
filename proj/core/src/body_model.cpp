#include "imudse/body_model.hpp"

#include <array>

#include <fmt/format.h>

#include "imudse/error.hpp"
#include "json_util.hpp"

namespace imudse {

namespace {

// SMPL joint order: 0 pelvis, 1 L hip, 2 R hip, 3 spine1, 4 L knee, 5 R knee,
// 6 spine2, 7 L ankle, 8 R ankle, 9 spine3, 10 L foot, 11 R foot, 12 neck,
// 13 L collar, 14 R collar, 15 head, 16 L shoulder, 17 R shoulder,
// 18 L elbow, 19 R elbow, 20 L wrist, 21 R wrist, 22 L hand, 23 R hand.
constexpr std::array<int, kSmplJointCount> kSmplParents = {
    -1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 9, 9, 12, 13, 14, 16, 17, 18, 19, 20, 21};

// Approximate adult proportions; not the SMPL template.
constexpr std::array<std::array<double, 3>, kSmplJointCount> kRestOffsets = {{
    {0.0, 0.0, 0.0},
    {0.06, -0.09, 0.0},
    {-0.06, -0.09, 0.0},
    {0.0, 0.11, -0.02},
    {0.04, -0.38, 0.0},
    {-0.04, -0.38, 0.0},
    {0.0, 0.14, 0.0},
    {-0.01, -0.40, -0.04},
    {0.01, -0.40, -0.04},
    {0.0, 0.06, 0.02},
    {0.04, -0.06, 0.12},
    {-0.04, -0.06, 0.12},
    {0.0, 0.21, -0.03},
    {0.08, 0.12, -0.02},
    {-0.08, 0.12, -0.02},
    {0.0, 0.09, 0.05},
    {0.12, 0.04, -0.01},
    {-0.12, 0.04, -0.01},
    {0.26, -0.01, -0.02},
    {-0.26, -0.01, -0.02},
    {0.25, 0.01, 0.0},
    {-0.25, 0.01, 0.0},
    {0.08, -0.01, -0.01},
    {-0.08, -0.01, -0.01},
}};

struct DefaultAttachment {
    int vertex_id;
    int joint_id;
    std::array<double, 3> offset;
};

// Vertices of the 25 basic sensor positions with their actuating joints.
constexpr std::array<DefaultAttachment, 25> kSensorVertices = {{
    {3021, 0, {0.0, 0.0, -0.10}},
    {3016, 3, {0.0, 0.05, -0.12}},
    {3496, 9, {0.0, 0.05, 0.12}},
    {4362, 2, {-0.02, -0.18, 0.07}},
    {876, 1, {0.02, -0.18, 0.07}},
    {4197, 14, {-0.08, 0.03, 0.0}},
    {707, 13, {0.08, 0.03, 0.0}},
    {1305, 9, {0.0, 0.08, -0.11}},
    {958, 1, {0.07, -0.12, 0.0}},
    {4444, 2, {-0.07, -0.12, 0.0}},
    {5335, 17, {-0.13, 0.0, 0.03}},
    {1874, 16, {0.13, 0.0, 0.03}},
    {1719, 16, {0.20, 0.0, -0.04}},
    {5188, 17, {-0.20, 0.0, -0.04}},
    {4516, 2, {-0.03, -0.32, 0.06}},
    {1032, 1, {0.03, -0.32, 0.06}},
    {1623, 18, {0.12, 0.0, 0.03}},
    {5092, 19, {-0.12, 0.0, 0.03}},
    {4662, 5, {-0.01, -0.18, 0.06}},
    {1177, 4, {0.01, -0.18, 0.06}},
    {411, 12, {0.0, 0.15, 0.07}},
    {5424, 19, {-0.23, 0.0, 0.02}},
    {1961, 18, {0.23, 0.0, 0.02}},
    {3322, 4, {0.01, -0.38, 0.08}},
    {6723, 5, {-0.01, -0.38, 0.08}},
}};

Vec3 to_vec(const std::array<double, 3>& a)
{
    return {a[0], a[1], a[2]};
}

} // namespace

void Skeleton::validate() const
{
    if (parents.empty())
        throw ValidationError("skeleton: joint_count must be >= 1");
    if (rest_offsets.size() != parents.size())
        throw ValidationError(fmt::format("skeleton: {} rest offsets for {} joints", rest_offsets.size(), parents.size()));
    if (parents[0] != -1)
        throw ValidationError("skeleton: joint 0 must be the root (parent -1)");
    for (std::size_t j = 1; j < parents.size(); ++j) {
        if (parents[j] < 0 || static_cast<std::size_t>(parents[j]) >= j)
            throw ValidationError(fmt::format("skeleton: parent of joint {} is {}, must be in [0, {})", j, parents[j], j));
    }
    const bool smpl = parents.size() == kSmplJointCount;
    for (std::size_t i = 0; i < tracked_vertices.size(); ++i) {
        const auto& a = tracked_vertices[i];
        if (a.joint_id < 0 || static_cast<std::size_t>(a.joint_id) >= parents.size())
            throw ValidationError(fmt::format("skeleton: tracked vertex {} has invalid joint_id {}", i, a.joint_id));
        if (a.vertex_id < 0 || (smpl && a.vertex_id >= kSmplVertexCount))
            throw ValidationError(fmt::format("skeleton: tracked vertex {} has invalid vertex_id {}", i, a.vertex_id));
    }
}

const VertexAttachment& Skeleton::attachment_for_vertex(int vertex_id) const
{
    for (const auto& a : tracked_vertices) {
        if (a.vertex_id == vertex_id)
            return a;
    }
    throw ValidationError(fmt::format("skeleton does not track vertex {}", vertex_id));
}

Skeleton default_smpl_skeleton()
{
    Skeleton s;
    s.parents.assign(kSmplParents.begin(), kSmplParents.end());
    s.rest_offsets.reserve(kSmplJointCount);
    for (const auto& o : kRestOffsets)
        s.rest_offsets.push_back(to_vec(o));
    s.tracked_vertices.reserve(kSensorVertices.size());
    for (const auto& v : kSensorVertices)
        s.tracked_vertices.push_back({v.vertex_id, v.joint_id, to_vec(v.offset)});
    return s;
}

Skeleton load_skeleton(const std::filesystem::path& path)
{
    using detail::get_as;
    const auto doc = detail::read_json_file(path);
    const std::string where = path.string();

    Skeleton s;
    const auto joint_count = get_as<int>(detail::require(doc, "joint_count", where), where + ".joint_count");
    const auto& parents = detail::require(doc, "parents", where);
    const auto& offsets = detail::require(doc, "rest_offsets", where);
    if (!parents.is_array() || static_cast<int>(parents.size()) != joint_count)
        throw ValidationError(fmt::format("{}.parents: expected {} entries", where, joint_count));
    if (!offsets.is_array() || static_cast<int>(offsets.size()) != joint_count)
        throw ValidationError(fmt::format("{}.rest_offsets: expected {} entries", where, joint_count));
    for (std::size_t j = 0; j < parents.size(); ++j) {
        s.parents.push_back(get_as<int>(parents[j], fmt::format("{}.parents[{}]", where, j)));
        s.rest_offsets.push_back(detail::to_vec3(offsets[j], fmt::format("{}.rest_offsets[{}]", where, j)));
    }
    if (auto it = doc.find("tracked_vertices"); it != doc.end()) {
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto& v = (*it)[i];
            const std::string at = fmt::format("{}.tracked_vertices[{}]", where, i);
            s.tracked_vertices.push_back({
                get_as<int>(detail::require(v, "vertex_id", at), at + ".vertex_id"),
                get_as<int>(detail::require(v, "joint_id", at), at + ".joint_id"),
                detail::to_vec3(detail::require(v, "rest_offset", at), at + ".rest_offset"),
            });
        }
    }
    s.validate();
    return s;
}

void save_skeleton(const Skeleton& skeleton, const std::filesystem::path& path)
{
    using detail::json;
    json doc;
    doc["joint_count"] = skeleton.joint_count();
    doc["parents"] = skeleton.parents;
    json offsets = json::array();
    for (const auto& o : skeleton.rest_offsets)
        offsets.push_back(detail::from_vec3(o));
    doc["rest_offsets"] = std::move(offsets);
    json tracked = json::array();
    for (const auto& a : skeleton.tracked_vertices)
        tracked.push_back({{"vertex_id", a.vertex_id}, {"joint_id", a.joint_id}, {"rest_offset", detail::from_vec3(a.rest_offset)}});
    doc["tracked_vertices"] = std::move(tracked);
    detail::write_json_file(doc, path);
}

Pose Pose::rest(std::size_t joint_count)
{
    Pose p;
    p.local_rotations.assign(joint_count, Vec3::Zero());
    return p;
}

FKResult forward_kinematics(const Skeleton& skeleton, const Pose& pose)
{
    const std::size_t n = skeleton.joint_count();
    if (pose.local_rotations.size() != n)
        throw ValidationError(fmt::format("pose has {} joints, skeleton has {}", pose.local_rotations.size(), n));

    FKResult fk;
    fk.global_rotations.resize(n);
    fk.global_positions.resize(n);
    fk.global_rotations[0] = axis_angle_to_matrix(pose.local_rotations[0]);
    // Positions are accumulated relative to the root and translated last, so a
    // root shift moves every joint by exactly that shift.
    fk.global_positions[0] = Vec3::Zero();
    for (std::size_t j = 1; j < n; ++j) {
        const auto p = static_cast<std::size_t>(skeleton.parents[j]);
        fk.global_rotations[j] = fk.global_rotations[p] * axis_angle_to_matrix(pose.local_rotations[j]);
        fk.global_positions[j] = fk.global_positions[p] + fk.global_rotations[p] * skeleton.rest_offsets[j];
    }
    for (auto& pos : fk.global_positions)
        pos += pose.root_translation;
    return fk;
}

Vec3 vertex_position(const FKResult& fk, const VertexAttachment& attachment)
{
    if (attachment.joint_id < 0 || static_cast<std::size_t>(attachment.joint_id) >= fk.global_positions.size())
        throw ValidationError(fmt::format("attachment joint_id {} out of range", attachment.joint_id));
    const auto j = static_cast<std::size_t>(attachment.joint_id);
    return fk.global_positions[j] + fk.global_rotations[j] * attachment.rest_offset;
}

} // namespace imudse
