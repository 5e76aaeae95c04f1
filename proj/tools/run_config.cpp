#include "run_config.hpp"

#include <cstdlib>
#include <fstream>
#include <string>

#include <fmt/format.h>
#include <json.hpp>

#include "imudse/error.hpp"

namespace imudse::cli {

namespace {

using json = nlohmann::json;

/// Walks a config document, tracking the dotted path for error messages.
class Node {
public:
    Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

    [[nodiscard]] const std::string& path() const noexcept { return path_; }
    [[nodiscard]] const json& raw() const noexcept { return value_; }

    [[nodiscard]] std::optional<Node> child(const std::string& key) const
    {
        if (!value_.is_object())
            fail("expected an object");
        auto it = value_.find(key);
        if (it == value_.end() || it->is_null())
            return std::nullopt;
        return Node(*it, path_.empty() ? key : path_ + "." + key);
    }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw ValidationError(fmt::format("{}: {}", path_.empty() ? "<root>" : path_, what));
    }

    [[nodiscard]] double number() const
    {
        if (!value_.is_number())
            fail(fmt::format("expected a number, got {}", value_.dump()));
        return value_.get<double>();
    }
    [[nodiscard]] long long integer() const
    {
        if (!value_.is_number_integer())
            fail(fmt::format("expected an integer, got {}", value_.dump()));
        return value_.get<long long>();
    }
    [[nodiscard]] bool boolean() const
    {
        if (!value_.is_boolean())
            fail(fmt::format("expected true or false, got {}", value_.dump()));
        return value_.get<bool>();
    }
    [[nodiscard]] std::string string() const
    {
        if (!value_.is_string())
            fail(fmt::format("expected a string, got {}", value_.dump()));
        return value_.get<std::string>();
    }
    [[nodiscard]] std::vector<Node> array() const
    {
        if (!value_.is_array())
            fail(fmt::format("expected an array, got {}", value_.dump()));
        std::vector<Node> out;
        for (std::size_t i = 0; i < value_.size(); ++i)
            out.emplace_back(value_[i], fmt::format("{}[{}]", path_, i));
        return out;
    }
    [[nodiscard]] std::vector<std::string> strings() const
    {
        std::vector<std::string> out;
        for (const auto& n : array())
            out.push_back(n.string());
        return out;
    }
    [[nodiscard]] Vec3 vec3() const
    {
        const auto items = array();
        if (items.size() != 3)
            fail("expected 3 numbers");
        return {items[0].number(), items[1].number(), items[2].number()};
    }

private:
    const json& value_;
    std::string path_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p)
{
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

void check_exists(const Node& node, const std::filesystem::path& p)
{
    if (!std::filesystem::exists(p))
        node.fail(fmt::format("'{}' does not exist", p.string()));
}

template <typename Fn>
void with(const Node& parent, const std::string& key, Fn&& fn)
{
    if (auto c = parent.child(key))
        fn(*c);
}

} // namespace

RunConfig load_run_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError(fmt::format("cannot open config file '{}'", path.string()));
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(fmt::format("{}: malformed config (byte {})", path.string(), e.byte));
    }
    const Node root(doc, "");
    if (!doc.is_object())
        root.fail("expected an object");

    RunConfig cfg;
    cfg.source = path;
    const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");

    with(root, "paths", [&](const Node& paths) {
        with(paths, "dataset_dir", [&](const Node& n) {
            cfg.dataset_dir = resolve(base, n.string());
            check_exists(n, *cfg.dataset_dir);
        });
        with(paths, "skeleton_file", [&](const Node& n) {
            cfg.skeleton_file = resolve(base, n.string());
            check_exists(n, *cfg.skeleton_file);
        });
        with(paths, "sensor_table_file", [&](const Node& n) {
            cfg.sensor_table_file = resolve(base, n.string());
            check_exists(n, *cfg.sensor_table_file);
        });
        with(paths, "output_dir", [&](const Node& n) { cfg.output_dir = resolve(base, n.string()); });
    });
    if (cfg.output_dir.empty()) {
        if (const char* env = std::getenv(kOutputDirEnv); env && *env)
            cfg.output_dir = env;
        else
            cfg.output_dir = base / "dse_out";
    }

    with(root, "sensors", [&](const Node& n) {
        std::vector<int> ids;
        for (const auto& item : n.array())
            ids.push_back(static_cast<int>(item.integer()));
        cfg.sensors = std::move(ids);
    });

    with(root, "dataset", [&](const Node& ds) {
        with(ds, "test_subjects", [&](const Node& n) { cfg.split.test_subjects = n.strings(); });
        with(ds, "finetune_subjects", [&](const Node& n) { cfg.split.finetune_subjects = n.strings(); });
        with(ds, "train_subjects", [&](const Node& n) { cfg.split.train_subjects = n.strings(); });
        with(ds, "holdout_count", [&](const Node& n) {
            const auto v = n.integer();
            if (v < 0)
                n.fail("must be >= 0");
            cfg.split.holdout_count = static_cast<std::size_t>(v);
        });
        with(ds, "split_seed", [&](const Node& n) { cfg.split.seed = static_cast<std::uint64_t>(n.integer()); });
    });

    with(root, "constraints", [&](const Node& c) {
        with(c, "max_sensors", [&](const Node& n) {
            cfg.constraints.max_sensors = static_cast<int>(n.integer());
            if (cfg.constraints.max_sensors < 1)
                n.fail("must be >= 1");
        });
        with(c, "require_root", [&](const Node& n) { cfg.constraints.require_root = n.boolean(); });
        with(c, "one_per_segment", [&](const Node& n) { cfg.constraints.one_per_segment = n.boolean(); });
        with(c, "symmetric_only", [&](const Node& n) { cfg.constraints.symmetric_only = n.boolean(); });
    });

    with(root, "synthesis", [&](const Node& s) {
        with(s, "smoothing_span", [&](const Node& n) {
            cfg.synthesis.smoothing_span = static_cast<int>(n.integer());
            if (cfg.synthesis.smoothing_span < 1)
                n.fail("must be >= 1");
        });
        with(s, "include_gravity", [&](const Node& n) { cfg.synthesis.include_gravity = n.boolean(); });
        with(s, "gravity", [&](const Node& n) { cfg.synthesis.gravity = n.vec3(); });
        with(s, "root_relative", [&](const Node& n) { cfg.synthesis.root_relative = n.boolean(); });
        with(s, "noise", [&](const Node& noise) {
            with(noise, "sigma_ori", [&](const Node& n) {
                cfg.synthesis.noise.sigma_ori = n.number();
                if (!(cfg.synthesis.noise.sigma_ori >= 0.0))
                    n.fail("must be >= 0");
            });
            with(noise, "sigma_acc", [&](const Node& n) {
                cfg.synthesis.noise.sigma_acc = n.number();
                if (!(cfg.synthesis.noise.sigma_acc >= 0.0))
                    n.fail("must be >= 0");
            });
        });
    });

    with(root, "estimator", [&](const Node& e) {
        with(e, "kind", [&](const Node& n) {
            try {
                cfg.estimator.kind = parse_estimator_kind(n.string());
            } catch (const ValidationError& err) {
                n.fail(err.what());
            }
        });
        with(e, "window", [&](const Node& n) {
            cfg.estimator.window = static_cast<int>(n.integer());
            if (cfg.estimator.window < 1 || cfg.estimator.window % 2 == 0)
                n.fail("must be odd and >= 1");
        });
        with(e, "ridge_alpha", [&](const Node& n) {
            cfg.estimator.ridge_alpha = n.number();
            if (!(cfg.estimator.ridge_alpha >= 0.0))
                n.fail("must be >= 0");
        });
        with(e, "finetune_weight", [&](const Node& n) {
            cfg.estimator.finetune_weight = static_cast<int>(n.integer());
            if (cfg.estimator.finetune_weight < 1)
                n.fail("must be >= 1");
        });
        with(e, "seed", [&](const Node& n) { cfg.estimator.seed = static_cast<std::uint64_t>(n.integer()); });
    });

    with(root, "seed", [&](const Node& n) { cfg.seed = static_cast<std::uint64_t>(n.integer()); });
    with(root, "workers", [&](const Node& n) {
        cfg.workers = static_cast<int>(n.integer());
        if (cfg.workers < 1)
            n.fail("must be >= 1");
    });
    with(root, "record_runtime", [&](const Node& n) { cfg.record_runtime = n.boolean(); });
    with(root, "report_k", [&](const Node& n) {
        const auto v = n.integer();
        if (v < 1)
            n.fail("must be >= 1");
        cfg.report_k = static_cast<std::size_t>(v);
    });
    with(root, "lambda_grid", [&](const Node& g) {
        if (g.raw().is_array()) {
            cfg.lambdas.clear();
            for (const auto& item : g.array()) {
                const double v = item.number();
                if (!(v >= 0.0 && v <= 1.0))
                    item.fail("must be within [0, 1]");
                cfg.lambdas.push_back(v);
            }
            return;
        }
        double start = 0.0, stop = 1.0, step = 0.05;
        with(g, "start", [&](const Node& n) { start = n.number(); });
        with(g, "stop", [&](const Node& n) { stop = n.number(); });
        with(g, "step", [&](const Node& n) { step = n.number(); });
        if (start < 0.0 || stop > 1.0 || !(step > 0.0) || start > stop)
            g.fail("need 0 <= start <= stop <= 1 and step > 0");
        cfg.lambdas = lambda_grid(start, stop, step);
    });
    return cfg;
}

Skeleton load_config_skeleton(const RunConfig& config)
{
    return config.skeleton_file ? load_skeleton(*config.skeleton_file) : default_smpl_skeleton();
}

SensorTable load_config_table(const RunConfig& config)
{
    SensorTable table = config.sensor_table_file ? load_sensor_table(*config.sensor_table_file) : default_sensor_table();
    if (config.sensors)
        table = table.restricted_to(*config.sensors);
    return table;
}

DSEPlan make_plan(const RunConfig& config)
{
    if (!config.dataset_dir)
        throw ValidationError("paths.dataset_dir: required for a DSE run");
    DSEPlan plan;
    plan.dataset = split_dataset(load_motion_directory(*config.dataset_dir), config.split);
    plan.dataset_source = config.dataset_dir->string();
    plan.skeleton = load_config_skeleton(config);
    plan.skeleton_source = config.skeleton_file ? config.skeleton_file->string() : "default";
    plan.table = load_config_table(config);
    plan.table_source = config.sensor_table_file ? config.sensor_table_file->string() : "default";
    plan.constraints = config.constraints;
    plan.synthesis = config.synthesis;
    plan.estimator = config.estimator;
    plan.seed = config.seed;
    plan.output_dir = config.output_dir;
    plan.lambdas = config.lambdas;
    plan.workers = config.workers;
    plan.record_runtime = config.record_runtime;
    return plan;
}

} // namespace imudse::cli
