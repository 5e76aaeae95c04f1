#include "imudse/dse_engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "imudse/error.hpp"
#include "imudse/results_io.hpp"
#include "imudse/seeding.hpp"
#include "json_util.hpp"

namespace imudse {

using detail::json;

double combined_metric(double error, int sensor_count, double lambda)
{
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw ValidationError(fmt::format("combined metric: lambda {} is outside [0, 1]", lambda));
    if (!(error >= 0.0))
        throw ValidationError(fmt::format("combined metric: error {} must be >= 0", error));
    return error * (1.0 - lambda) + lambda * static_cast<double>(sensor_count);
}

double combined_metric_scale(Metric metric) noexcept
{
    return metric == Metric::jitter ? 0.1 : 1.0;
}

std::vector<double> lambda_grid(double start, double stop, double step)
{
    if (!(step > 0.0) || start > stop)
        throw ValidationError("lambda grid: need step > 0 and start <= stop");
    std::vector<double> out;
    for (long k = 0;; ++k) {
        const double v = start + static_cast<double>(k) * step;
        if (v > stop + 1e-9)
            break;
        out.push_back(std::min(v, stop));
    }
    return out;
}

void DSEPlan::validate() const
{
    constraints.validate();
    synthesis.validate();
    estimator.validate();
    skeleton.validate();
    if (workers < 1)
        throw ValidationError("workers: must be >= 1");
    for (double l : lambdas) {
        if (!(l >= 0.0 && l <= 1.0))
            throw ValidationError(fmt::format("lambda_grid: value {} is outside [0, 1]", l));
    }
    if (dataset.count(Split::train) == 0)
        throw ValidationError("dataset: the train split is empty");
    if (dataset.count(Split::test) == 0)
        throw ValidationError("dataset: the test split is empty");
}

namespace {

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Every index runs
/// exactly once; the first exception is rethrown after all threads finish.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn)
{
    const auto threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure)
                            failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure)
        std::rethrow_exception(failure);
}

/// Clean IMU streams for every table sensor plus the aligned ground truth.
struct PreparedSequence {
    const MotionSequence* motion = nullptr;
    Split split = Split::train;
    VirtualIMUSequence clean;
    std::vector<Pose> ground_truth; ///< frames [n, T - n)
};

std::vector<SensorAttachment> table_attachments(const SensorTable& table, const Skeleton& skeleton)
{
    std::vector<SensorAttachment> out;
    for (const auto& row : table.rows()) {
        const auto& v = skeleton.attachment_for_vertex(row.vertex_id);
        if (v.joint_id != row.joint_id)
            throw ValidationError(fmt::format("sensor {}: table joint {} disagrees with skeleton joint {} for vertex {}",
                                              row.sensor_id, row.joint_id, v.joint_id, row.vertex_id));
        out.push_back({row.sensor_id, v});
    }
    return out;
}

struct Aggregate {
    double sip = 0.0, angular = 0.0, positional = 0.0, mesh = 0.0, jitter = 0.0;
    double frames = 0.0, jitter_frames = 0.0;

    void add(const PoseErrorReport& r, std::size_t n)
    {
        const auto w = static_cast<double>(n);
        const auto wj = static_cast<double>(n - 3);
        sip += w * r.sip_deg;
        angular += w * r.angular_deg;
        positional += w * r.positional_cm;
        mesh += w * r.mesh_cm;
        jitter += wj * r.jitter_km_s3;
        frames += w;
        jitter_frames += wj;
    }

    PoseErrorReport mean() const
    {
        return {sip / frames, angular / frames, positional / frames, mesh / frames, jitter / jitter_frames};
    }
};

EvaluationRecord evaluate_configuration(const DSEPlan& plan, const std::vector<PreparedSequence>& prepared,
                                        const SensorConfiguration& config, int config_id)
{
    EvaluationRecord rec;
    rec.config_id = config_id;
    rec.config = config;
    const auto started = std::chrono::steady_clock::now();

    try {
        const std::uint64_t config_seed = hash_combine(plan.seed, std::span<const int>(config.sensor_ids));
        const int root = config.contains(kRootSensorId) ? kRootSensorId : config.sensor_ids.front();
        const int half = plan.estimator.window / 2;

        auto features_for = [&](const PreparedSequence& p) {
            NoiseSpec noise = plan.synthesis.noise;
            noise.seed = hash_combine(config_seed, p.motion->name);
            VirtualIMUSequence imu = add_noise(p.clean.select(config.sensor_ids), noise);
            if (plan.synthesis.root_relative)
                imu = normalize_root_relative(imu, root);
            return build_features(imu, plan.estimator.window);
        };
        auto trimmed_truth = [&](const PreparedSequence& p) {
            return std::span<const Pose>(p.ground_truth).subspan(static_cast<std::size_t>(half),
                                                                  p.ground_truth.size() - 2 * static_cast<std::size_t>(half));
        };

        TrainingSet train;
        TrainingSet finetune;
        for (const auto& p : prepared) {
            if (p.split == Split::train)
                train.append(features_for(p), pose_targets(trimmed_truth(p)));
            else if (p.split == Split::finetune)
                finetune.append(features_for(p), pose_targets(trimmed_truth(p)));
        }
        const TrainedEstimator est = fit(plan.estimator, train, finetune);

        Aggregate agg;
        for (const auto& p : prepared) {
            if (p.split != Split::test)
                continue;
            std::vector<Pose> pred = est.predict(features_for(p));
            const auto truth = trimmed_truth(p);
            agg.add(evaluate(pred, truth, plan.skeleton, p.motion->fps), truth.size());
        }
        rec.report = agg.mean();
    } catch (const std::exception& e) {
        rec.valid = false;
        rec.message = e.what();
        const double nan = std::nan("");
        rec.report = {nan, nan, nan, nan, nan};
    }
    rec.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return rec;
}

} // namespace

ResultStore run_dse(const DSEPlan& plan)
{
    plan.validate();
    const auto configs = enumerate_configurations(plan.table, plan.constraints);
    if (configs.empty())
        throw ValidationError("dse: the constraints admit no sensor configuration");

    const auto attachments = table_attachments(plan.table, plan.skeleton);
    const auto n = static_cast<std::size_t>(plan.synthesis.smoothing_span);

    std::vector<PreparedSequence> prepared;
    for (std::size_t i = 0; i < plan.dataset.sequences.size(); ++i) {
        if (plan.dataset.labels[i] == Split::validation)
            continue;
        prepared.push_back({&plan.dataset.sequences[i], plan.dataset.labels[i], {}, {}});
    }
    parallel_for(prepared.size(), plan.workers, [&](std::size_t i) {
        auto& p = prepared[i];
        p.clean = synthesize_clean(*p.motion, plan.skeleton, attachments, plan.synthesis);
        p.ground_truth.assign(p.motion->frames.begin() + static_cast<std::ptrdiff_t>(n),
                              p.motion->frames.end() - static_cast<std::ptrdiff_t>(n));
    });

    ResultStore store;
    store.records.resize(configs.size());
    parallel_for(configs.size(), plan.workers, [&](std::size_t i) {
        store.records[i] = evaluate_configuration(plan, prepared, configs[i], static_cast<int>(i));
    });

    if (!plan.output_dir.empty())
        write_run_outputs(plan, store);
    return store;
}

namespace {

bool entry_less(const RankEntry& a, const RankEntry& b, double ka, double kb)
{
    if (ka != kb)
        return ka < kb;
    return a.config < b.config;
}

std::map<int, std::vector<RankEntry>> group_by_count(const std::vector<EvaluationRecord>& records, Metric metric)
{
    std::map<int, std::vector<RankEntry>> levels;
    for (const auto& r : records) {
        if (!r.valid)
            continue;
        levels[r.sensor_count()].push_back({r.config_id, r.config, metric_value(r.report, metric), 0.0});
    }
    for (auto& [count, entries] : levels) {
        std::sort(entries.begin(), entries.end(),
                  [](const RankEntry& a, const RankEntry& b) { return entry_less(a, b, a.error, b.error); });
    }
    return levels;
}

} // namespace

std::vector<RankEntry> rank(const std::vector<EvaluationRecord>& records, Metric metric, double lambda)
{
    const double scale = combined_metric_scale(metric);
    std::vector<RankEntry> out;
    for (const auto& r : records) {
        if (!r.valid)
            continue;
        const double e = scale * metric_value(r.report, metric);
        out.push_back({r.config_id, r.config, e, combined_metric(e, r.sensor_count(), lambda)});
    }
    std::sort(out.begin(), out.end(),
              [](const RankEntry& a, const RankEntry& b) { return entry_less(a, b, a.score, b.score); });
    return out;
}

std::vector<CountBest> best_per_count(const std::vector<EvaluationRecord>& records, Metric metric, std::size_t k)
{
    std::vector<CountBest> out;
    for (auto& [count, entries] : group_by_count(records, metric)) {
        CountBest cb;
        cb.count = count;
        cb.best.assign(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(std::min(k, entries.size())));
        if (!cb.best.empty()) {
            cb.min_error = cb.best.front().error;
            cb.max_error = cb.best.back().error;
        }
        out.push_back(std::move(cb));
    }
    return out;
}

std::string OccurrenceRow::label() const
{
    return fmt::format("{}", fmt::join(sensor_ids, ", "));
}

const OccurrenceRow& OccurrenceTable::row_for(int sensor_id) const
{
    for (const auto& r : rows) {
        if (std::find(r.sensor_ids.begin(), r.sensor_ids.end(), sensor_id) != r.sensor_ids.end())
            return r;
    }
    throw ValidationError(fmt::format("occurrence table has no row for sensor {}", sensor_id));
}

OccurrenceTable count_occurrences(const std::vector<SensorConfiguration>& best,
                                  const std::vector<SensorConfiguration>& worst, const SensorTable& table)
{
    OccurrenceTable out;
    for (const auto& r : table.rows()) {
        if (r.symmetry_partner && table.contains(*r.symmetry_partner)) {
            if (*r.symmetry_partner < r.sensor_id)
                continue;
            out.rows.push_back({{r.sensor_id, *r.symmetry_partner}, 0, 0});
        } else {
            out.rows.push_back({{r.sensor_id}, 0, 0});
        }
    }
    std::sort(out.rows.begin(), out.rows.end(),
              [](const OccurrenceRow& a, const OccurrenceRow& b) { return a.sensor_ids.front() < b.sensor_ids.front(); });

    auto tally = [&](const std::vector<SensorConfiguration>& configs, int OccurrenceRow::*field) {
        for (const auto& c : configs) {
            for (auto& row : out.rows) {
                const bool present = std::any_of(row.sensor_ids.begin(), row.sensor_ids.end(),
                                                 [&](int id) { return c.contains(id); });
                if (present)
                    ++(row.*field);
            }
        }
    };
    tally(best, &OccurrenceRow::best_count);
    tally(worst, &OccurrenceRow::worst_count);
    out.best_total = static_cast<int>(best.size());
    out.worst_total = static_cast<int>(worst.size());
    return out;
}

OccurrenceTable occurrence_analysis(const std::vector<EvaluationRecord>& records, Metric metric, std::size_t k,
                                    const SensorTable& table)
{
    std::vector<SensorConfiguration> best;
    std::vector<SensorConfiguration> worst;
    for (auto& [count, entries] : group_by_count(records, metric)) {
        const std::size_t nb = std::min(k, entries.size());
        const std::size_t nw = std::min(k, entries.size() - nb);
        for (std::size_t i = 0; i < nb; ++i)
            best.push_back(entries[i].config);
        for (std::size_t i = entries.size() - nw; i < entries.size(); ++i)
            worst.push_back(entries[i].config);
    }
    return count_occurrences(best, worst, table);
}

std::vector<ParetoEntry> pareto_front(const std::vector<EvaluationRecord>& records, Metric metric)
{
    std::map<int, double> level_min;
    for (const auto& r : records) {
        if (!r.valid)
            continue;
        const double e = metric_value(r.report, metric);
        auto [it, inserted] = level_min.try_emplace(r.sensor_count(), e);
        if (!inserted)
            it->second = std::min(it->second, e);
    }
    std::vector<ParetoEntry> out;
    for (const auto& r : records) {
        if (!r.valid)
            continue;
        const double e = metric_value(r.report, metric);
        bool dominated = e > level_min.at(r.sensor_count());
        for (auto it = level_min.begin(); !dominated && it != level_min.end() && it->first < r.sensor_count(); ++it)
            dominated = it->second <= e;
        if (!dominated)
            out.push_back({r.config_id, r.config, e});
    }
    std::sort(out.begin(), out.end(), [](const ParetoEntry& a, const ParetoEntry& b) { return a.config < b.config; });
    return out;
}

std::vector<SweepPoint> lambda_sweep(const std::vector<EvaluationRecord>& records, Metric metric,
                                     const std::vector<double>& lambdas)
{
    const double scale = combined_metric_scale(metric);
    std::vector<SweepPoint> out;
    const auto best = best_per_count(records, metric, 1);
    for (double l : lambdas) {
        for (const auto& cb : best) {
            if (cb.best.empty())
                continue;
            const double e = scale * cb.best.front().error;
            out.push_back({l, cb.count, cb.best.front().config, e, combined_metric(e, cb.count, l)});
        }
    }
    return out;
}

void write_run_outputs(const DSEPlan& plan, const ResultStore& store)
{
    const auto& dir = plan.output_dir;
    std::filesystem::create_directories(dir);

    std::vector<EvaluationRecord> records = store.records;
    if (!plan.record_runtime) {
        std::string timings = "config_id,runtime_s\n";
        for (auto& r : records) {
            timings += fmt::format("{},{:.6f}\n", r.config_id, r.runtime_s);
            r.runtime_s = 0.0;
        }
        write_text_file(dir / "timings.csv", timings);
    }
    write_text_file(dir / "results.csv", format_results_csv(records));

    json manifest;
    manifest["dataset"] = {{"source", plan.dataset_source}, {"sequences", json::array()}};
    for (std::size_t i = 0; i < plan.dataset.sequences.size(); ++i) {
        const auto& s = plan.dataset.sequences[i];
        manifest["dataset"]["sequences"].push_back(
            {{"name", s.name}, {"subject", s.subject}, {"frames", s.frames.size()}, {"fps", s.fps},
             {"split", to_string(plan.dataset.labels[i])}});
    }
    manifest["skeleton"] = {{"source", plan.skeleton_source}, {"joint_count", plan.skeleton.joint_count()},
                            {"tracked_vertices", plan.skeleton.tracked_vertices.size()}};
    json table = json::array();
    for (const auto& r : plan.table.rows()) {
        table.push_back({{"sensor_id", r.sensor_id}, {"vertex_id", r.vertex_id}, {"joint_id", r.joint_id},
                         {"dist", r.dist_from_root},
                         {"partner", r.symmetry_partner ? json(*r.symmetry_partner) : json(nullptr)}});
    }
    manifest["sensor_table"] = {{"source", plan.table_source}, {"sensors", std::move(table)}};
    manifest["constraints"] = {{"max_sensors", plan.constraints.max_sensors},
                               {"require_root", plan.constraints.require_root},
                               {"one_per_segment", plan.constraints.one_per_segment},
                               {"symmetric_only", plan.constraints.symmetric_only}};
    const auto& syn = plan.synthesis;
    manifest["synthesis"] = {{"smoothing_span", syn.smoothing_span},
                             {"include_gravity", syn.include_gravity},
                             {"gravity", detail::from_vec3(syn.gravity)},
                             {"root_relative", syn.root_relative},
                             {"noise", {{"sigma_ori", syn.noise.sigma_ori}, {"sigma_acc", syn.noise.sigma_acc}}}};
    manifest["estimator"] = {{"kind", to_string(plan.estimator.kind)},
                             {"window", plan.estimator.window},
                             {"ridge_alpha", plan.estimator.ridge_alpha},
                             {"finetune_weight", plan.estimator.finetune_weight},
                             {"seed", plan.estimator.seed}};
    manifest["seed"] = plan.seed;
    manifest["lambda_grid"] = plan.lambdas;
    manifest["workers"] = plan.workers;
    manifest["record_runtime"] = plan.record_runtime;
    int invalid = 0;
    for (const auto& r : store.records)
        invalid += r.valid ? 0 : 1;
    manifest["configurations"] = {{"total", store.records.size()}, {"invalid", invalid}};
    json failures = json::array();
    for (const auto& r : store.records) {
        if (!r.valid)
            failures.push_back({{"config_id", r.config_id}, {"sensor_ids", r.config.sensor_ids}, {"error", r.message}});
    }
    manifest["failures"] = std::move(failures);
    detail::write_json_file(manifest, dir / "manifest.json");
}

void write_reports(const std::vector<EvaluationRecord>& records, const SensorTable& table,
                   const std::vector<double>& lambdas, std::size_t k, const std::filesystem::path& dir)
{
    std::vector<std::pair<Metric, std::vector<SweepPoint>>> sweeps;
    for (Metric m : kAllMetrics) {
        const std::string name = to_string(m);
        write_text_file(dir / fmt::format("best_per_count_{}.csv", name),
                        format_best_per_count_csv(best_per_count(records, m, k), m));
        write_text_file(dir / fmt::format("pareto_{}.csv", name), format_pareto_csv(pareto_front(records, m), m));
        write_text_file(dir / fmt::format("occurrences_{}.csv", name),
                        format_occurrence_csv(occurrence_analysis(records, m, k, table), m));
        write_text_file(dir / fmt::format("ranking_{}.csv", name), format_ranking_csv(rank(records, m, 0.5), m, 0.5));
        sweeps.emplace_back(m, lambda_sweep(records, m, lambdas));
    }
    write_text_file(dir / "lambda_sweep.csv", format_lambda_sweep_csv(sweeps));
}

} // namespace imudse
