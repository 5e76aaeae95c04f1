// Acceptance suite: one PASS/FAIL line per criterion. Every tolerance and
// runtime budget is a named constant below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cli.hpp"
#include "imudse/body_model.hpp"
#include "imudse/config_space.hpp"
#include "imudse/dse_engine.hpp"
#include "imudse/imu_synthesis.hpp"
#include "imudse/metrics.hpp"
#include "imudse/results_io.hpp"
#include "test_support.hpp"

namespace {

using namespace imudse;
namespace fs = std::filesystem;

constexpr double kScoreTolerance = 1e-12;
constexpr double kExpectedScore = 5.015;
constexpr double kQuadraticRelTolerance = 1e-9;
constexpr double kOrthonormalTolerance = 1e-9;
constexpr double kChainTolerance = 1e-12;
constexpr double kAngleTolerance = 1e-9;
constexpr int kRandomPoses = 10000;
constexpr std::size_t kMaxDeskConfigs = 40;

constexpr double kBudget1 = 1.0;
constexpr double kBudget2 = 1.0;
constexpr double kBudget3 = 1.0;
constexpr double kBudget4 = 60.0;
constexpr double kBudget5 = 1.0;
constexpr double kBudget6 = 10.0;
constexpr double kBudget7 = 5.0;
constexpr double kBudget8 = 600.0;
constexpr double kBudget9 = 1.0;

// Observed on the desk corpus (seed 2024, nearest neighbour) and pinned.
constexpr double kPinnedFullMesh = 11.139749827027009;
constexpr double kPinnedMesh_0_2 = 13.264818682267924;
constexpr double kPinnedMesh_0_20 = 13.163598833684445;
constexpr double kPinnedRelTolerance = 1e-9;

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what)
    {
        if (!cond) {
            ok = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

int failures = 0;

void report(int id, const std::string& title, double budget, const std::function<Check()>& body)
{
    const auto start = std::chrono::steady_clock::now();
    Check c;
    try {
        c = body();
    } catch (const std::exception& e) {
        c.ok = false;
        c.detail = fmt::format("exception: {}", e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= budget)
        c.require(false, fmt::format("runtime {:.3f}s exceeds {:.0f}s", secs, budget));
    if (!c.ok)
        ++failures;
    fmt::print("{} criterion {}: {} ({:.3f}s) {}\n", c.ok ? "PASS" : "FAIL", id, title, secs, c.detail);
    std::fflush(stdout);
}

std::vector<EvaluationRecord> reference_records()
{
    std::vector<EvaluationRecord> out;
    int id = 0;
    for (const auto& [count, error] : testing::reference_best_mesh_errors()) {
        EvaluationRecord r;
        r.config_id = id++;
        std::vector<int> ids;
        for (int i = 0; i < count; ++i)
            ids.push_back(i);
        r.config = SensorConfiguration(ids);
        r.report.mesh_cm = error;
        out.push_back(r);
    }
    return out;
}

Check criterion1()
{
    Check c;
    const auto ranking = rank(reference_records(), Metric::mesh, 0.5);
    const auto& top = ranking.front();
    c.require(top.config.count() == 4, fmt::format("first count {}", top.config.count()));
    c.require(std::abs(top.score - kExpectedScore) <= kScoreTolerance, fmt::format("score {:.17g}", top.score));
    c.require(fmt::format("{:.6f}", top.score) == "5.015000", "score does not print as 5.015000");
    c.note(fmt::format("top count {} score {:.6f}", top.config.count(), top.score));
    return c;
}

Check criterion2()
{
    Check c;
    std::vector<EvaluationRecord> records;
    int id = 0;
    for (const auto& [count, configs] : testing::reference_best_mesh_configs()) {
        double e = 1.0;
        for (const auto& ids : configs) {
            EvaluationRecord r;
            r.config_id = id++;
            r.config = SensorConfiguration(ids);
            r.report.mesh_cm = e;
            e += 0.01;
            records.push_back(r);
        }
    }
    const auto table = occurrence_analysis(records, Metric::mesh, 5, default_sensor_table());
    c.require(table.best_total == 44, fmt::format("best total {}", table.best_total));
    const std::pair<int, int> expected[] = {{0, 44}, {2, 18}, {21, 24}, {16, 13}};
    for (const auto& [sensor, count] : expected) {
        const auto& row = table.row_for(sensor);
        c.require(row.best_count == count, fmt::format("row {} = {}, want {}", row.label(), row.best_count, count));
        c.note(fmt::format("[{}]={}", row.label(), row.best_count));
    }
    return c;
}

Check criterion3()
{
    Check c;
    const SensorTable table = default_sensor_table();
    int valid = 0;
    for (const auto& [count, configs] : testing::reference_best_mesh_configs()) {
        for (const auto& ids : configs) {
            const SensorConfiguration cfg(ids);
            const auto r = validate_configuration(cfg, table, Constraints{});
            c.require(r.valid, to_string(cfg) + " rejected");
            valid += r.valid ? 1 : 0;
        }
    }
    const auto bad = validate_configuration(SensorConfiguration({0, 2, 7}), table, Constraints{});
    bool segment = false;
    for (const auto& v : bad.violations)
        segment = segment || v.rfind("one_per_segment", 0) == 0;
    c.require(!bad.valid && segment, "[0, 2, 7] not rejected by one_per_segment");
    c.note(fmt::format("{}/44 valid; [0, 2, 7] rejected", valid));
    return c;
}

Check criterion4()
{
    Check c;
    const SensorTable table = default_sensor_table();
    const auto fast = enumerate_configurations(table, Constraints{});
    const auto oracle = testing::brute_force_enumeration(table, Constraints{});
    c.require(fast == oracle, fmt::format("enumeration {} vs oracle {}", fast.size(), oracle.size()));
    c.note(fmt::format("{} configurations (reference publication reports 2,249)", fast.size()));
    return c;
}

Check criterion5()
{
    Check c;
    constexpr double fps = 60.0;
    constexpr int n = 4;
    std::vector<Vec3> quad;
    for (int t = 0; t < 61; ++t) {
        const double s = t / fps;
        quad.emplace_back(0.5 * 2.0 * s * s, 0.0, 0.0);
    }
    const auto a = synthesize_accelerations(quad, fps, n);
    double worst = 0.0;
    for (const auto& v : a)
        worst = std::max(worst, (v - Vec3(2.0, 0.0, 0.0)).norm() / 2.0);
    c.require(worst <= kQuadraticRelTolerance, fmt::format("quadratic rel error {:.3g}", worst));
    c.require(a.size() == quad.size() - 2 * n, "quadratic length");

    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> coef(-1000, 1000);
    bool affine_zero = true;
    for (int trial = 0; trial < 100; ++trial) {
        const Vec3 slope(coef(rng), coef(rng), coef(rng));
        const Vec3 offset(coef(rng), coef(rng), coef(rng));
        std::vector<Vec3> p;
        for (int t = 0; t < 50; ++t)
            p.push_back(slope * t + offset);
        const auto acc = synthesize_accelerations(p, fps, n);
        affine_zero = affine_zero && acc.size() == p.size() - 2 * n;
        for (const auto& v : acc)
            affine_zero = affine_zero && v == Vec3::Zero();
    }
    c.require(affine_zero, "affine trajectory gave nonzero acceleration or wrong length");

    MotionSequence m;
    m.frames.assign(37, Pose::rest(kSmplJointCount));
    const std::vector<SensorAttachment> att = {{0, {3021, 0, Vec3::Zero()}}};
    const auto imu = synthesize(m, default_smpl_skeleton(), att, SynthesisParams{});
    c.require(imu.frame_count() == 37 - 2 * 4, fmt::format("pipeline length {}", imu.frame_count()));
    c.note(fmt::format("quadratic rel error {:.2g}", worst));
    return c;
}

Check criterion6()
{
    Check c;
    const Skeleton s = default_smpl_skeleton();
    const FKResult rest = forward_kinematics(s, Pose::rest(s.joint_count()));
    for (std::size_t j = 0; j < s.joint_count(); ++j) {
        std::vector<std::size_t> path;
        for (int k = static_cast<int>(j); k > 0; k = s.parents[static_cast<std::size_t>(k)])
            path.push_back(static_cast<std::size_t>(k));
        Vec3 expected = Vec3::Zero();
        for (auto it = path.rbegin(); it != path.rend(); ++it)
            expected += s.rest_offsets[*it];
        c.require(rest.global_positions[j] == expected, fmt::format("rest position of joint {}", j));
    }

    std::mt19937_64 rng(6);
    double worst_ortho = 0.0;
    for (int i = 0; i < kRandomPoses; ++i) {
        const FKResult fk = forward_kinematics(s, testing::random_pose(rng, s.joint_count(), 3.1));
        for (const auto& r : fk.global_rotations)
            worst_ortho = std::max(worst_ortho, orthonormality_error(r));
    }
    c.require(worst_ortho < kOrthonormalTolerance, fmt::format("orthonormality {:.3g}", worst_ortho));

    Skeleton chain;
    chain.parents = {-1, 0};
    chain.rest_offsets = {Vec3::Zero(), Vec3(0.1, -0.4, 0.25)};
    double worst_chain = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Pose p = testing::random_pose(rng, 2, 3.1);
        const Mat3 r0 = testing::eigen_rotation(p.local_rotations[0]);
        const Mat3 r1 = r0 * testing::eigen_rotation(p.local_rotations[1]);
        const FKResult fk = forward_kinematics(chain, p);
        worst_chain = std::max({worst_chain, (fk.global_rotations[0] - r0).cwiseAbs().maxCoeff(),
                                (fk.global_rotations[1] - r1).cwiseAbs().maxCoeff(),
                                (fk.global_positions[1] - (p.root_translation + r0 * chain.rest_offsets[1]))
                                    .cwiseAbs()
                                    .maxCoeff()});
    }
    c.require(worst_chain <= kChainTolerance, fmt::format("chain deviation {:.3g}", worst_chain));
    c.note(fmt::format("orthonormality {:.2g}, chain {:.2g}", worst_ortho, worst_chain));
    return c;
}

std::vector<Pose> root_path(std::size_t frames, const std::function<Vec3(int)>& f)
{
    std::vector<Pose> out;
    for (std::size_t t = 0; t < frames; ++t) {
        Pose p = Pose::rest(1);
        p.root_translation = f(static_cast<int>(t));
        out.push_back(p);
    }
    return out;
}

Check criterion7()
{
    Check c;
    const Skeleton s = default_smpl_skeleton();
    std::mt19937_64 rng(7);
    std::vector<Pose> x;
    for (int t = 0; t < 30; ++t)
        x.push_back(testing::random_pose(rng, s.joint_count()));
    const auto self = evaluate(x, x, s, 60.0);
    c.require(self.sip_deg == 0.0 && self.angular_deg == 0.0 && self.positional_cm == 0.0 && self.mesh_cm == 0.0,
              "evaluate(x, x) not zero");

    Skeleton point;
    point.parents = {-1};
    point.rest_offsets = {Vec3::Zero()};
    const auto line = root_path(30, [](int t) { return Vec3(3.0 * t, -2.0 * t, 0.5 * t) + Vec3(1, 2, 3); });
    const double line_jitter = jitter(line, point, 60.0);
    c.require(line_jitter == 0.0, fmt::format("constant-velocity jitter {}", line_jitter));

    // Dyadic frame rate keeps every sample and difference exact.
    const auto cubic64 = root_path(20, [](int t) {
        const double s = t / 64.0;
        return Vec3(2000.0 * s * s * s, 0.0, 0.0);
    });
    const double j64 = jitter(cubic64, point, 64.0);
    c.require(j64 == 12.0, fmt::format("cubic jitter at 64 fps {:.17g}", j64));
    const auto cubic60 = root_path(20, [](int t) {
        const double s = t / 60.0;
        return Vec3(2000.0 * s * s * s, 0.0, 0.0);
    });
    const double j60 = jitter(cubic60, point, 60.0);
    c.require(std::abs(j60 - 12.0) <= kAngleTolerance * 12.0, fmt::format("cubic jitter at 60 fps {:.17g}", j60));

    auto rotated = x;
    const Mat3 q = testing::eigen_rotation(testing::random_unit(rng) * (30.0 * std::numbers::pi / 180.0));
    for (auto& p : rotated) {
        p.local_rotations[0] = matrix_to_axis_angle(q * axis_angle_to_matrix(p.local_rotations[0]));
        p.root_translation = q * p.root_translation;
    }
    const double sip = sip_error(rotated, x, s);
    const double ang = angular_error(rotated, x, s);
    c.require(std::abs(sip - 30.0) <= kAngleTolerance, fmt::format("sip {:.17g}", sip));
    c.require(std::abs(ang - 30.0) <= kAngleTolerance, fmt::format("angular {:.17g}", ang));
    c.note(fmt::format("cubic jitter {} (64 fps), {:.15g} (60 fps); sip {:.12g}", j64, j60, sip));
    return c;
}

int run_cli(const std::vector<std::string>& args, std::string& err_text)
{
    std::vector<const char*> argv = {"imudse"};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    err_text = err.str();
    return code;
}

struct DeskRun {
    bool ready = false;
    std::string error;
    fs::path w1;
};

Check criterion8(const fs::path& work, const fs::path& data, DeskRun& desk)
{
    Check c;
    fs::remove_all(work);
    fs::create_directories(work);
    std::string err;
    c.require(run_cli({"motions", "gen", "--spec", (data / "desk_corpus.json").string(), "--out",
                       (work / "corpus").string()},
                      err) == 0,
              "motions gen failed: " + err);
    const auto corpus = load_motion_directory(work / "corpus");
    std::size_t frames = 0;
    for (const auto& m : corpus)
        frames = std::max(frames, m.frames.size());
    c.require(corpus.size() == 20 && frames == 600, fmt::format("corpus {} x {} frames", corpus.size(), frames));

    fs::copy_file(data / "desk_run.json", work / "desk_run.json", fs::copy_options::overwrite_existing);
    const auto config = (work / "desk_run.json").string();
    desk.w1 = work / "run_w1";
    const fs::path w8 = work / "run_w8";
    c.require(run_cli({"dse", "run", "--config", config, "--workers", "1", "--out", desk.w1.string()}, err) == 0,
              "dse run (1 worker) failed: " + err);
    c.require(run_cli({"dse", "run", "--config", config, "--workers", "8", "--out", w8.string()}, err) == 0,
              "dse run (8 workers) failed: " + err);
    if (!c.ok)
        return c;

    const std::string a = read_text_file(desk.w1 / "results.csv");
    const std::string b = read_text_file(w8 / "results.csv");
    c.require(a == b, "results.csv differs between 1 and 8 workers");
    const auto records = parse_results_csv(a);
    c.require(records.size() <= kMaxDeskConfigs, fmt::format("{} configurations", records.size()));
    const auto table = default_sensor_table().restricted_to({0, 2, 20, 16, 17, 18, 19});
    c.require(records.size() == testing::brute_force_enumeration(table, Constraints{}).size(),
              "record count differs from the enumeration oracle");
    c.note(fmt::format("{} configurations, {} bytes identical", records.size(), a.size()));
    desk.ready = c.ok;
    return c;
}

Check criterion9(const DeskRun& desk)
{
    Check c;
    if (!desk.ready) {
        c.require(false, "desk run from criterion 8 unavailable");
        return c;
    }
    const auto records = load_results_csv(desk.w1 / "results.csv");
    const SensorConfiguration full({0, 2, 16, 17, 18, 19, 20});
    double full_mesh = std::nan("");
    std::vector<std::pair<SensorConfiguration, double>> pairs;
    for (const auto& r : records) {
        c.require(r.valid, to_string(r.config) + " invalid");
        if (r.config == full)
            full_mesh = r.report.mesh_cm;
        if (r.config.count() == 2)
            pairs.emplace_back(r.config, r.report.mesh_cm);
    }
    c.require(!std::isnan(full_mesh), "full configuration missing");
    c.require(pairs.size() == 2, fmt::format("{} two-sensor configurations", pairs.size()));
    for (const auto& [cfg, mesh] : pairs)
        c.require(full_mesh <= mesh, fmt::format("full {:.6f} > {} {:.6f}", full_mesh, to_string(cfg), mesh));

    auto pinned = [&](const char* label, double got, double want) {
        const bool ok = std::abs(got - want) <= kPinnedRelTolerance * std::abs(want);
        c.require(ok, fmt::format("{} = {:.17g}, pinned {:.17g}", label, got, want));
    };
    pinned("full mesh", full_mesh, kPinnedFullMesh);
    for (const auto& [cfg, mesh] : pairs) {
        if (cfg == SensorConfiguration({0, 2}))
            pinned("[0, 2] mesh", mesh, kPinnedMesh_0_2);
        else
            pinned("[0, 20] mesh", mesh, kPinnedMesh_0_20);
    }
    std::string summary = fmt::format("full {:.6f} cm", full_mesh);
    for (const auto& [cfg, mesh] : pairs)
        summary += fmt::format(", {} {:.6f} cm", to_string(cfg), mesh);
    c.note(summary);
    return c;
}

} // namespace

int main(int argc, char** argv)
{
    const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "imudse_acceptance";
    const fs::path data = IMUDSE_TEST_DATA_DIR;

    report(1, "combined-metric argmin over reference best mesh errors", kBudget1, criterion1);
    report(2, "occurrence counts over the 44 reference configurations", kBudget2, criterion2);
    report(3, "reference configurations validate", kBudget3, criterion3);
    report(4, "enumeration equals brute-force oracle", kBudget4, criterion4);
    report(5, "acceleration synthesis analytics", kBudget5, criterion5);
    report(6, "forward kinematics suite", kBudget6, criterion6);
    report(7, "metric suite", kBudget7, criterion7);
    DeskRun desk;
    report(8, "end-to-end determinism across worker counts", kBudget8, [&] { return criterion8(work, data, desk); });
    report(9, "pinned desk-scale mesh regression", kBudget9, [&] { return criterion9(desk); });

    fmt::print("{} of 9 criteria passed\n", 9 - failures);
    return failures == 0 ? 0 : 1;
}
