#include <random>

#include <benchmark/benchmark.h>

#include "imudse/body_model.hpp"
#include "imudse/config_space.hpp"
#include "imudse/imu_synthesis.hpp"
#include "imudse/metrics.hpp"
#include "imudse/motion_data.hpp"
#include "imudse/pose_estimator.hpp"

namespace {

using namespace imudse;

MotionSequence bench_motion(double seconds)
{
    SinusoidMotionSpec spec;
    spec.duration = seconds;
    spec.joints = {{1, Vec3::UnitX(), 0.5, 1.0, 0.0}, {16, Vec3::UnitZ(), 0.7, 0.8, 0.3},
                   {18, Vec3::UnitY(), 0.8, 1.2, 0.1}, {4, Vec3::UnitX(), 0.6, 1.7, 0.0}};
    return generate_synthetic_motion(spec);
}

std::vector<SensorAttachment> all_attachments(const Skeleton& s)
{
    std::vector<SensorAttachment> out;
    const SensorTable t = default_sensor_table();
    for (const auto& r : t.rows())
        out.push_back({r.sensor_id, s.attachment_for_vertex(r.vertex_id)});
    return out;
}

void BM_Enumerate(benchmark::State& state)
{
    const SensorTable t = default_sensor_table();
    Constraints c;
    c.max_sensors = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(enumerate_configurations(t, c));
}
BENCHMARK(BM_Enumerate)->Arg(4)->Arg(7)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_ForwardKinematics(benchmark::State& state)
{
    const Skeleton s = default_smpl_skeleton();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Pose p = Pose::rest(24);
    for (auto& r : p.local_rotations)
        r = Vec3(u(rng), u(rng), u(rng));
    for (auto _ : state)
        benchmark::DoNotOptimize(forward_kinematics(s, p));
}
BENCHMARK(BM_ForwardKinematics);

void BM_Synthesize(benchmark::State& state)
{
    const Skeleton s = default_smpl_skeleton();
    const auto att = all_attachments(s);
    const MotionSequence m = bench_motion(static_cast<double>(state.range(0)));
    const SynthesisParams params;
    for (auto _ : state)
        benchmark::DoNotOptimize(synthesize(m, s, att, params));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.frames.size()));
}
BENCHMARK(BM_Synthesize)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_NearestNeighborPredict(benchmark::State& state)
{
    const Skeleton s = default_smpl_skeleton();
    const auto att = all_attachments(s);
    const std::vector<int> ids = {0, 2, 16, 17, 18, 19, 20};
    const auto imu = normalize_root_relative(synthesize(bench_motion(10.0), s, att, SynthesisParams{}).select(ids), 0);
    const auto x = build_features(imu, 5);
    const MotionSequence m = bench_motion(10.0);
    std::vector<Pose> truth(m.frames.begin() + 6, m.frames.end() - 6);
    TrainingSet train;
    train.append(x, pose_targets(truth));
    const auto est = fit(EstimatorSpec{}, train, TrainingSet{});
    const Eigen::MatrixXd q = x.topRows(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(est.predict_targets(q));
}
BENCHMARK(BM_NearestNeighborPredict)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Evaluate(benchmark::State& state)
{
    const Skeleton s = default_smpl_skeleton();
    const MotionSequence a = bench_motion(2.0);
    const MotionSequence b = bench_motion(2.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(evaluate(a.frames, b.frames, s, 60.0));
}
BENCHMARK(BM_Evaluate)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
