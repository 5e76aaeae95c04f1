#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "imudse/error.hpp"
#include "imudse/metrics.hpp"
#include "test_support.hpp"

namespace imudse {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

std::vector<Pose> random_sequence(std::mt19937_64& rng, std::size_t frames)
{
    std::vector<Pose> out;
    for (std::size_t t = 0; t < frames; ++t)
        out.push_back(testing::random_pose(rng, 24));
    return out;
}

/// Right-multiplies a joint's local rotation, which right-multiplies its
/// global rotation by the same delta.
void perturb_local(Pose& p, int joint, const Vec3& delta)
{
    const auto j = static_cast<std::size_t>(joint);
    p.local_rotations[j] = matrix_to_axis_angle(axis_angle_to_matrix(p.local_rotations[j]) * axis_angle_to_matrix(delta));
}

/// Applies a world-frame rotation to the whole body.
void rotate_world(Pose& p, const Mat3& q)
{
    p.local_rotations[0] = matrix_to_axis_angle(q * axis_angle_to_matrix(p.local_rotations[0]));
    p.root_translation = q * p.root_translation;
}

TEST(MetricNames, ParseBothForms)
{
    EXPECT_EQ(parse_metric("mesh"), Metric::mesh);
    EXPECT_EQ(parse_metric("mesh_cm"), Metric::mesh);
    EXPECT_EQ(parse_metric("jitter_km_s3"), Metric::jitter);
    try {
        (void)parse_metric("latency");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("sip, angular, positional, mesh, jitter"), std::string::npos);
    }
    for (Metric m : kAllMetrics)
        EXPECT_EQ(parse_metric(to_string(m)), m);
}

TEST(Metrics, IdenticalSequencesScoreZero)
{
    std::mt19937_64 rng(211);
    const Skeleton s = default_smpl_skeleton();
    const auto x = random_sequence(rng, 12);
    const PoseErrorReport r = evaluate(x, x, s, 60.0);
    EXPECT_EQ(r.sip_deg, 0.0);
    EXPECT_EQ(r.angular_deg, 0.0);
    EXPECT_EQ(r.positional_cm, 0.0);
    EXPECT_EQ(r.mesh_cm, 0.0);
    EXPECT_EQ(r.jitter_km_s3, jitter(x, s, 60.0));
    EXPECT_GT(r.jitter_km_s3, 0.0);
}

TEST(Metrics, EvaluateMatchesIndividualOps)
{
    std::mt19937_64 rng(223);
    const Skeleton s = default_smpl_skeleton();
    const auto a = random_sequence(rng, 8);
    const auto b = random_sequence(rng, 8);
    const PoseErrorReport r = evaluate(a, b, s, 30.0);
    EXPECT_EQ(r.sip_deg, sip_error(a, b, s));
    EXPECT_EQ(r.angular_deg, angular_error(a, b, s));
    EXPECT_EQ(r.positional_cm, positional_error(a, b, s));
    EXPECT_EQ(r.mesh_cm, mesh_error(a, b, s));
    EXPECT_EQ(r.jitter_km_s3, jitter(a, s, 30.0));
    const PoseErrorReport again = evaluate(a, b, s, 30.0);
    EXPECT_EQ(again.mesh_cm, r.mesh_cm);
    for (Metric m : kAllMetrics)
        EXPECT_GE(metric_value(r, m), 0.0);
}

TEST(Sip, UniformGlobalPerturbation)
{
    std::mt19937_64 rng(227);
    const Skeleton s = default_smpl_skeleton();
    const auto gt = random_sequence(rng, 10);
    auto pred = gt;
    for (auto& p : pred)
        rotate_world(p, testing::eigen_rotation(testing::random_unit(rng) * 30.0 * kDeg));
    EXPECT_NEAR(sip_error(pred, gt, s), 30.0, 1e-9);
    EXPECT_NEAR(angular_error(pred, gt, s), 30.0, 1e-9);
}

TEST(Sip, SingleJointAveragedOverFour)
{
    std::mt19937_64 rng(229);
    const Skeleton s = default_smpl_skeleton();
    const auto gt = random_sequence(rng, 10);
    auto pred = gt;
    for (auto& p : pred)
        perturb_local(p, 16, testing::random_unit(rng) * 20.0 * kDeg);
    EXPECT_NEAR(sip_error(pred, gt, s), 5.0, 1e-9);
}

TEST(Angular, LeafJointAveragedOverAll)
{
    std::mt19937_64 rng(233);
    const Skeleton s = default_smpl_skeleton();
    const auto gt = random_sequence(rng, 10);
    auto pred = gt;
    for (auto& p : pred)
        perturb_local(p, 15, testing::random_unit(rng) * 24.0 * kDeg);
    EXPECT_NEAR(angular_error(pred, gt, s), 1.0, 1e-9);
}

TEST(Angular, InvariantUnderCommonRotation)
{
    std::mt19937_64 rng(239);
    const Skeleton s = default_smpl_skeleton();
    const auto a = random_sequence(rng, 6);
    const auto b = random_sequence(rng, 6);
    auto qa = a;
    auto qb = b;
    const Mat3 q = testing::random_rotation(rng);
    for (std::size_t t = 0; t < a.size(); ++t) {
        rotate_world(qa[t], q);
        rotate_world(qb[t], q);
    }
    EXPECT_NEAR(sip_error(qa, qb, s), sip_error(a, b, s), 1e-9);
    EXPECT_NEAR(angular_error(qa, qb, s), angular_error(a, b, s), 1e-9);
    EXPECT_NEAR(positional_error(qa, qb, s), positional_error(a, b, s), 1e-9);
    EXPECT_NEAR(mesh_error(qa, qb, s), mesh_error(a, b, s), 1e-9);
}

TEST(Positional, TranslationRemovedByAlignment)
{
    std::mt19937_64 rng(241);
    const Skeleton s = default_smpl_skeleton();
    const auto gt = random_sequence(rng, 10);
    auto pred = gt;
    for (auto& p : pred)
        p.root_translation += Vec3(0.01, 0.0, 0.0);
    EXPECT_NEAR(positional_error(pred, gt, s), 0.0, 1e-12);
    EXPECT_NEAR(mesh_error(pred, gt, s), 0.0, 1e-12);
}

// Joint 15 is the only child of joint 12 and a leaf, so bending joint 12
// moves joint 15 alone.
double bend_for_displacement(const Skeleton& s, double meters)
{
    return 2.0 * std::asin(meters / (2.0 * s.rest_offsets[15].norm()));
}

TEST(Positional, SingleJointOffset)
{
    std::mt19937_64 rng(251);
    const Skeleton s = default_smpl_skeleton();
    const auto gt = random_sequence(rng, 10);
    auto pred = gt;
    const double angle = bend_for_displacement(s, 0.02);
    for (auto& p : pred) {
        Vec3 axis = testing::random_unit(rng);
        axis = (axis - axis.dot(s.rest_offsets[15].normalized()) * s.rest_offsets[15].normalized()).normalized();
        perturb_local(p, 12, axis * angle);
    }
    EXPECT_NEAR(positional_error(pred, gt, s), 2.0 / 24.0, 1e-9);
}

TEST(Mesh, OffsetOnOneJointScalesByShare)
{
    std::mt19937_64 rng(257);
    Skeleton s = default_smpl_skeleton();
    s.tracked_vertices = {{1, 15, Vec3::Zero()}, {2, 15, Vec3::Zero()}, {3, 0, Vec3(0.1, 0, 0)},
                          {4, 4, Vec3(0, 0.05, 0)}, {5, 20, Vec3(0, 0, 0.02)}};
    const auto gt = random_sequence(rng, 10);
    auto pred = gt;
    const double angle = bend_for_displacement(s, 0.03);
    const Vec3 bone = s.rest_offsets[15].normalized();
    for (auto& p : pred) {
        Vec3 axis = testing::random_unit(rng);
        axis = (axis - axis.dot(bone) * bone).normalized();
        perturb_local(p, 12, axis * angle);
    }
    EXPECT_NEAR(mesh_error(pred, gt, s), 3.0 / 5.0 * 2.0, 1e-9);
}

TEST(Mesh, NeedsTrackedVertices)
{
    Skeleton s = default_smpl_skeleton();
    s.tracked_vertices.clear();
    const std::vector<Pose> x(2, Pose::rest(24));
    EXPECT_THROW((void)mesh_error(x, x, s), ValidationError);
}

TEST(Metrics, LengthMismatchFails)
{
    const Skeleton s = default_smpl_skeleton();
    const std::vector<Pose> a(3, Pose::rest(24));
    const std::vector<Pose> b(4, Pose::rest(24));
    EXPECT_THROW((void)sip_error(a, b, s), ValidationError);
    EXPECT_THROW((void)angular_error(a, b, s), ValidationError);
    EXPECT_THROW((void)positional_error(a, b, s), ValidationError);
    EXPECT_THROW((void)mesh_error(a, b, s), ValidationError);
}

Skeleton single_joint()
{
    Skeleton s;
    s.parents = {-1};
    s.rest_offsets = {Vec3::Zero()};
    return s;
}

std::vector<Pose> root_path(std::size_t frames, double fps, auto&& f)
{
    std::vector<Pose> out;
    for (std::size_t t = 0; t < frames; ++t) {
        Pose p = Pose::rest(1);
        p.root_translation = f(static_cast<double>(t) / fps);
        out.push_back(p);
    }
    return out;
}

TEST(Jitter, ConstantAndConstantVelocityAreZero)
{
    const Skeleton s = default_smpl_skeleton();
    std::mt19937_64 rng(263);
    std::vector<Pose> still(10, testing::random_pose(rng, 24));
    EXPECT_EQ(jitter(still, s, 60.0), 0.0);

    const auto line = root_path(20, 64.0, [](double t) { return Vec3(3.0 * t, -1.0 * t, 0.5); });
    EXPECT_EQ(jitter(line, single_joint(), 64.0), 0.0);
    const auto line60 = root_path(20, 60.0, [](double t) { return Vec3(3.0 * t, -1.0 * t, 0.5); });
    EXPECT_NEAR(jitter(line60, single_joint(), 60.0), 0.0, 1e-9);
}

TEST(Jitter, CubicGivesSixC)
{
    auto cubic = [](double t) { return Vec3(2000.0 * t * t * t, 0.0, 0.0); };
    EXPECT_EQ(jitter(root_path(16, 64.0, cubic), single_joint(), 64.0), 12.0);
    EXPECT_NEAR(jitter(root_path(16, 60.0, cubic), single_joint(), 60.0), 12.0, 1e-6);

    // Every joint of a rest-pose body shares the root path.
    std::vector<Pose> body;
    for (int t = 0; t < 16; ++t) {
        Pose p = Pose::rest(24);
        p.root_translation = cubic(t / 60.0);
        body.push_back(p);
    }
    EXPECT_NEAR(jitter(body, default_smpl_skeleton(), 60.0), 12.0, 1e-6);
}

TEST(Jitter, InvariantUnderRigidTransform)
{
    std::mt19937_64 rng(269);
    const Skeleton s = default_smpl_skeleton();
    SinusoidMotionSpec spec;
    spec.duration = 0.5;
    spec.joints = {{1, Vec3::UnitX(), 0.5, 2.0, 0.0}, {18, Vec3::UnitZ(), 0.7, 1.0, 0.3}};
    const auto seq = generate_synthetic_motion(spec).frames;
    auto moved = seq;
    const Mat3 q = testing::random_rotation(rng);
    for (auto& p : moved) {
        rotate_world(p, q);
        p.root_translation += Vec3(1.0, 2.0, -0.5);
    }
    const double a = jitter(seq, s, 60.0);
    EXPECT_GT(a, 0.0);
    EXPECT_NEAR(jitter(moved, s, 60.0), a, 1e-7 * a);
}

TEST(Jitter, NeedsFourFrames)
{
    const std::vector<Pose> x(3, Pose::rest(24));
    EXPECT_THROW((void)jitter(x, default_smpl_skeleton(), 60.0), ValidationError);
    const std::vector<Pose> y(4, Pose::rest(24));
    EXPECT_EQ(jitter(y, default_smpl_skeleton(), 60.0), 0.0);
}

} // namespace
} // namespace imudse
