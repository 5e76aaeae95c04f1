#include "cli.hpp"

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "imudse/error.hpp"
#include "imudse/results_io.hpp"
#include "imudse/seeding.hpp"
#include "run_config.hpp"

namespace imudse::cli {

namespace {

struct Options {
    std::string config;
    std::string spec;
    std::string out;
    std::string motion;
    std::string sensors;
    std::string results;
    std::string metric = "mesh";
    double lambda = 0.5;
    std::size_t k = 5;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    bool timing = false;
};

void emit(const std::string& text, const std::string& out_path, std::ostream& out)
{
    if (out_path.empty())
        out << text;
    else
        write_text_file(out_path, text);
}

RunConfig config_with_overrides(const Options& o)
{
    RunConfig cfg = load_run_config(o.config);
    if (o.seed)
        cfg.seed = *o.seed;
    if (o.workers) {
        if (*o.workers < 1)
            throw ValidationError("--workers: must be >= 1");
        cfg.workers = *o.workers;
    }
    if (!o.out.empty())
        cfg.output_dir = o.out;
    if (o.timing)
        cfg.record_runtime = true;
    return cfg;
}

SensorTable table_for(const Options& o)
{
    return o.config.empty() ? default_sensor_table() : load_config_table(load_run_config(o.config));
}

int cmd_motions_gen(const Options& o, std::ostream& out)
{
    const auto spec = load_corpus_spec(o.spec);
    const auto corpus = generate_corpus(spec);
    std::filesystem::create_directories(o.out);
    for (const auto& seq : corpus)
        save_motion(seq, std::filesystem::path(o.out) / (seq.name + ".json"));
    fmt::print(out, "wrote {} sequences to {}\n", corpus.size(), o.out);
    return kExitOk;
}

int cmd_synth(const Options& o, std::ostream& out)
{
    const RunConfig cfg = config_with_overrides(o);
    const Skeleton skeleton = load_config_skeleton(cfg);
    const SensorTable table = load_config_table(cfg);
    const MotionSequence motion = load_motion(o.motion);
    const SensorConfiguration config = parse_configuration(o.sensors);

    std::vector<SensorAttachment> attachments;
    for (int id : config.sensor_ids)
        attachments.push_back({id, skeleton.attachment_for_vertex(table.at(id).vertex_id)});
    SynthesisParams params = cfg.synthesis;
    params.noise.seed = hash_combine(cfg.seed, motion.name);
    const auto imu = synthesize(motion, skeleton, attachments, params);
    save_imu(imu, params, o.out);
    fmt::print(out, "wrote {} frames x {} sensors to {}\n", imu.frame_count(), imu.sensor_count(), o.out);
    return kExitOk;
}

int cmd_enumerate(const Options& o, std::ostream& out)
{
    const RunConfig cfg = load_run_config(o.config);
    const auto configs = enumerate_configurations(load_config_table(cfg), cfg.constraints);
    for (const auto& c : configs)
        out << to_string(c) << '\n';
    fmt::print(out, "count: {}\n", configs.size());
    return kExitOk;
}

int cmd_dse_run(const Options& o, std::ostream& out)
{
    const RunConfig cfg = config_with_overrides(o);
    const DSEPlan plan = make_plan(cfg);
    const ResultStore store = run_dse(plan);
    write_reports(store.records, plan.table, plan.lambdas, cfg.report_k, plan.output_dir);
    std::size_t invalid = 0;
    for (const auto& r : store.records)
        invalid += r.valid ? 0 : 1;
    fmt::print(out, "evaluated {} configurations ({} invalid); results in {}\n", store.records.size(), invalid,
               (plan.output_dir / "results.csv").string());
    return invalid == store.records.size() ? kExitRuntime : kExitOk;
}

int cmd_rank(const Options& o, std::ostream& out)
{
    const Metric metric = parse_metric(o.metric);
    const auto records = load_results_csv(o.results);
    emit(format_ranking_csv(rank(records, metric, o.lambda), metric, o.lambda), o.out, out);
    return kExitOk;
}

int cmd_occurrences(const Options& o, std::ostream& out)
{
    const Metric metric = parse_metric(o.metric);
    const auto records = load_results_csv(o.results);
    emit(format_occurrence_csv(occurrence_analysis(records, metric, o.k, table_for(o)), metric), o.out, out);
    return kExitOk;
}

int cmd_report(const Options& o, std::ostream& out)
{
    const auto records = load_results_csv(o.results);
    std::vector<double> lambdas = lambda_grid(0.0, 1.0, 0.05);
    if (!o.config.empty())
        lambdas = load_run_config(o.config).lambdas;
    const std::filesystem::path dir =
        o.out.empty() ? std::filesystem::path(o.results).parent_path() : std::filesystem::path(o.out);
    write_reports(records, table_for(o), lambdas, o.k, dir.empty() ? "." : dir);
    fmt::print(out, "wrote reports for {} records to {}\n", records.size(), dir.empty() ? "." : dir.string());
    return kExitOk;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Sensor-placement design space exploration for inertial pose estimation", "imudse"};
    app.require_subcommand(1);
    Options o;

    auto* motions = app.add_subcommand("motions", "Motion corpus tools");
    motions->require_subcommand(1);
    auto* gen = motions->add_subcommand("gen", "Generate a synthetic motion corpus");
    gen->add_option("--spec", o.spec, "Corpus generator spec (JSON)")->required();
    gen->add_option("--out", o.out, "Output directory")->required();

    auto* synth = app.add_subcommand("synth", "Dump virtual IMU data for one motion");
    synth->add_option("--config", o.config, "Run config")->required();
    synth->add_option("--motion", o.motion, "Motion file")->required();
    synth->add_option("--sensors", o.sensors, "Sensor ids, e.g. 0,2,16,17")->required();
    synth->add_option("--out", o.out, "Output IMU file")->required();
    synth->add_option("--seed", o.seed, "Override the global seed");

    auto* enumerate = app.add_subcommand("enumerate", "List admissible sensor configurations");
    enumerate->add_option("--config", o.config, "Run config")->required();

    auto* dse = app.add_subcommand("dse", "Design space exploration");
    dse->require_subcommand(1);
    auto* dse_run = dse->add_subcommand("run", "Evaluate every admissible configuration");
    dse_run->add_option("--config", o.config, "Run config")->required();
    dse_run->add_option("--workers", o.workers, "Worker threads");
    dse_run->add_option("--seed", o.seed, "Override the global seed");
    dse_run->add_option("--out", o.out, "Override the output directory");
    dse_run->add_flag("--timing", o.timing, "Record wall-clock runtime in results.csv");

    auto* rank_cmd = app.add_subcommand("rank", "Rank configurations by the combined metric");
    rank_cmd->add_option("--results", o.results, "results.csv")->required();
    rank_cmd->add_option("--metric", o.metric, "sip, angular, positional, mesh or jitter");
    rank_cmd->add_option("--lambda", o.lambda, "Hardware weight in [0, 1]");
    rank_cmd->add_option("--out", o.out, "Write CSV here instead of stdout");

    auto* occ = app.add_subcommand("occurrences", "Sensor occurrences in the k best/worst configurations");
    occ->add_option("--results", o.results, "results.csv")->required();
    occ->add_option("--metric", o.metric, "sip, angular, positional, mesh or jitter");
    occ->add_option("--k", o.k, "Configurations per count level");
    occ->add_option("--config", o.config, "Run config providing the sensor table");
    occ->add_option("--out", o.out, "Write CSV here instead of stdout");

    auto* report = app.add_subcommand("report", "Best-per-count, Pareto and lambda-sweep files");
    report->add_option("--results", o.results, "results.csv")->required();
    report->add_option("--k", o.k, "Configurations per count level");
    report->add_option("--config", o.config, "Run config providing the sensor table and lambda grid");
    report->add_option("--out", o.out, "Output directory (default: next to results.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }

    try {
        if (gen->parsed())
            return cmd_motions_gen(o, out);
        if (synth->parsed())
            return cmd_synth(o, out);
        if (enumerate->parsed())
            return cmd_enumerate(o, out);
        if (dse_run->parsed())
            return cmd_dse_run(o, out);
        if (rank_cmd->parsed())
            return cmd_rank(o, out);
        if (occ->parsed())
            return cmd_occurrences(o, out);
        if (report->parsed())
            return cmd_report(o, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return kExitRuntime;
    }
    err << "error: no command\n";
    return kExitValidation;
}

} // namespace imudse::cli
