#include "imudse/config_space.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "imudse/error.hpp"
#include "json_util.hpp"

namespace imudse {

using detail::get_as;
using detail::json;

SensorTable::SensorTable(std::vector<SensorSpec> rows) : rows_(std::move(rows))
{
    std::set<int> seen;
    for (const auto& r : rows_) {
        if (!seen.insert(r.sensor_id).second)
            throw ValidationError(fmt::format("sensor table: duplicate sensor id {}", r.sensor_id));
    }
    for (const auto& r : rows_) {
        if (!r.symmetry_partner)
            continue;
        const int p = *r.symmetry_partner;
        if (r.sensor_id == kRootSensorId)
            throw ValidationError("sensor table: the root sensor cannot have a symmetry partner");
        if (p == r.sensor_id)
            throw ValidationError(fmt::format("sensor table: sensor {} is its own partner", p));
        // A partner outside the table is allowed (restricted tables); it just
        // makes the sensor unusable under symmetric_only.
        if (contains(p)) {
            const auto& q = at(p);
            if (!q.symmetry_partner || *q.symmetry_partner != r.sensor_id)
                throw ValidationError(fmt::format("sensor table: partner of {} is {}, but partner of {} is not {}",
                                                  r.sensor_id, p, p, r.sensor_id));
        }
    }
}

bool SensorTable::contains(int sensor_id) const noexcept
{
    return std::any_of(rows_.begin(), rows_.end(), [&](const SensorSpec& r) { return r.sensor_id == sensor_id; });
}

const SensorSpec& SensorTable::at(int sensor_id) const
{
    for (const auto& r : rows_) {
        if (r.sensor_id == sensor_id)
            return r;
    }
    throw ValidationError(fmt::format("unknown sensor id {}", sensor_id));
}

SensorTable SensorTable::restricted_to(const std::vector<int>& ids) const
{
    for (int id : ids)
        (void)at(id);
    std::vector<SensorSpec> rows;
    for (const auto& r : rows_) {
        if (std::find(ids.begin(), ids.end(), r.sensor_id) != ids.end())
            rows.push_back(r);
    }
    return SensorTable(std::move(rows));
}

SensorTable default_sensor_table()
{
    struct Row {
        int vertex;
        int joint;
        double dist;
        int partner; // -1: none
    };
    // Sensor id is the row index.
    static constexpr std::array<Row, 25> kRows = {{
        {3021, 0, 0.0, -1},
        {3016, 3, 0.15647505, -1},
        {3496, 9, 0.3671748, -1},
        {4362, 2, 0.3722757, 4},
        {876, 1, 0.37316912, 3},
        {4197, 14, 0.39544925, 6},
        {707, 13, 0.3979012, 5},
        {1305, 9, 0.4103658, -1},
        {958, 1, 0.4610727, 9},
        {4444, 2, 0.46173838, 8},
        {5335, 17, 0.48945138, 11},
        {1874, 16, 0.49041077, 10},
        {1719, 16, 0.53829616, 13},
        {5188, 17, 0.53868234, 12},
        {4516, 2, 0.5407919, 15},
        {1032, 1, 0.5408928, 14},
        {1623, 18, 0.61126786, 17},
        {5092, 19, 0.61135274, 16},
        {4662, 5, 0.7051227, 19},
        {1177, 4, 0.70617384, 18},
        {411, 12, 0.72784156, -1},
        {5424, 19, 0.79017997, 22},
        {1961, 18, 0.7946686, 21},
        {3322, 4, 0.95263433, 24},
        {6723, 5, 0.9528295, 23},
    }};
    std::vector<SensorSpec> rows;
    rows.reserve(kRows.size());
    for (std::size_t i = 0; i < kRows.size(); ++i) {
        const auto& r = kRows[i];
        SensorSpec s{static_cast<int>(i), r.vertex, r.joint, r.dist, std::nullopt};
        if (r.partner >= 0)
            s.symmetry_partner = r.partner;
        rows.push_back(s);
    }
    return SensorTable(std::move(rows));
}

SensorTable load_sensor_table(const std::filesystem::path& path)
{
    const auto doc = detail::read_json_file(path);
    const std::string where = path.string();
    const auto& sensors = detail::require(doc, "sensors", where);
    if (!sensors.is_array())
        throw ValidationError(fmt::format("{}.sensors: expected an array", where));
    std::vector<SensorSpec> rows;
    for (std::size_t i = 0; i < sensors.size(); ++i) {
        const std::string at = fmt::format("{}.sensors[{}]", where, i);
        const auto& s = sensors[i];
        SensorSpec spec;
        spec.sensor_id = get_as<int>(detail::require(s, "sensor_id", at), at + ".sensor_id");
        spec.vertex_id = get_as<int>(detail::require(s, "vertex_id", at), at + ".vertex_id");
        spec.joint_id = get_as<int>(detail::require(s, "joint_id", at), at + ".joint_id");
        if (auto it = s.find("dist"); it != s.end())
            spec.dist_from_root = get_as<double>(*it, at + ".dist");
        if (auto it = s.find("partner"); it != s.end() && !it->is_null())
            spec.symmetry_partner = get_as<int>(*it, at + ".partner");
        rows.push_back(spec);
    }
    return SensorTable(std::move(rows));
}

void save_sensor_table(const SensorTable& table, const std::filesystem::path& path)
{
    json sensors = json::array();
    for (const auto& r : table.rows()) {
        json row = {{"sensor_id", r.sensor_id}, {"vertex_id", r.vertex_id}, {"joint_id", r.joint_id},
                    {"dist", r.dist_from_root}};
        row["partner"] = r.symmetry_partner ? json(*r.symmetry_partner) : json(nullptr);
        sensors.push_back(std::move(row));
    }
    detail::write_json_file(json{{"sensors", std::move(sensors)}}, path);
}

void Constraints::validate() const
{
    if (max_sensors < 1)
        throw ValidationError("constraints.max_sensors: must be >= 1");
}

SensorConfiguration::SensorConfiguration(std::vector<int> ids) : sensor_ids(std::move(ids))
{
    std::sort(sensor_ids.begin(), sensor_ids.end());
}

bool SensorConfiguration::contains(int id) const noexcept
{
    return std::binary_search(sensor_ids.begin(), sensor_ids.end(), id);
}

std::string to_string(const SensorConfiguration& config)
{
    return fmt::format("[{}]", fmt::join(config.sensor_ids, ", "));
}

SensorConfiguration parse_configuration(const std::string& text)
{
    std::vector<int> ids;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == '[' || c == ']' || c == ',' || c == ';' || c == ' ' || c == '\t') {
            ++i;
            continue;
        }
        int value = 0;
        const auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + text.size(), value);
        if (ec != std::errc() || ptr == text.data() + i)
            throw ValidationError(fmt::format("cannot parse sensor list '{}'", text));
        ids.push_back(value);
        i = static_cast<std::size_t>(ptr - text.data());
    }
    if (ids.empty())
        throw ValidationError(fmt::format("empty sensor list '{}'", text));
    return SensorConfiguration(std::move(ids));
}

ValidationResult validate_configuration(const SensorConfiguration& config, const SensorTable& table,
                                        const Constraints& constraints)
{
    for (int id : config.sensor_ids)
        (void)table.at(id);

    ValidationResult result;
    auto violate = [&](std::string msg) {
        result.valid = false;
        result.violations.push_back(std::move(msg));
    };

    const auto& ids = config.sensor_ids;
    if (ids.empty())
        violate("empty: configuration has no sensors");
    for (std::size_t i = 1; i < ids.size(); ++i) {
        if (ids[i] == ids[i - 1])
            violate(fmt::format("duplicate: sensor {} listed more than once", ids[i]));
    }
    if (static_cast<int>(ids.size()) > constraints.max_sensors)
        violate(fmt::format("max_sensors: {} sensors exceed the limit of {}", ids.size(), constraints.max_sensors));
    if (constraints.require_root && !config.contains(kRootSensorId))
        violate(fmt::format("require_root: root sensor {} missing", kRootSensorId));
    if (constraints.one_per_segment) {
        for (std::size_t i = 0; i < ids.size(); ++i) {
            for (std::size_t j = i + 1; j < ids.size(); ++j) {
                if (ids[i] == ids[j])
                    continue;
                const int joint = table.at(ids[i]).joint_id;
                if (joint == table.at(ids[j]).joint_id)
                    violate(fmt::format("one_per_segment: sensors {} and {} both have joint_id {}", ids[i], ids[j], joint));
            }
        }
    }
    if (constraints.symmetric_only) {
        for (int id : ids) {
            const auto& partner = table.at(id).symmetry_partner;
            if (partner && !config.contains(*partner))
                violate(fmt::format("symmetric_only: partner {} of sensor {} missing", *partner, id));
        }
    }
    return result;
}

namespace {

struct Unit {
    std::vector<int> ids;
    std::vector<int> joints;
};

struct Enumerator {
    const std::vector<Unit>& units;
    bool one_per_segment;
    std::size_t max_sensors;
    std::vector<int> current;
    std::vector<int> used_joints;
    std::vector<SensorConfiguration> out;

    bool joints_free(const Unit& u) const
    {
        if (!one_per_segment)
            return true;
        return std::none_of(u.joints.begin(), u.joints.end(), [&](int j) {
            return std::find(used_joints.begin(), used_joints.end(), j) != used_joints.end();
        });
    }

    void run(std::size_t next)
    {
        if (next == units.size()) {
            if (!current.empty())
                out.emplace_back(current);
            return;
        }
        run(next + 1);
        const Unit& u = units[next];
        if (current.size() + u.ids.size() > max_sensors || !joints_free(u))
            return;
        current.insert(current.end(), u.ids.begin(), u.ids.end());
        used_joints.insert(used_joints.end(), u.joints.begin(), u.joints.end());
        run(next + 1);
        current.resize(current.size() - u.ids.size());
        used_joints.resize(used_joints.size() - u.joints.size());
    }
};

} // namespace

std::vector<SensorConfiguration> enumerate_configurations(const SensorTable& table, const Constraints& constraints)
{
    constraints.validate();
    if (constraints.require_root && !table.contains(kRootSensorId))
        return {};

    // A unit is a sensor or, under symmetric_only, a symmetric pair that must
    // be placed together. Pairs whose partner is absent from the table can
    // never be closed and are dropped; pairs whose sides share a joint can
    // never be placed under one_per_segment.
    std::vector<Unit> units;
    for (const auto& r : table.rows()) {
        if (constraints.require_root && r.sensor_id == kRootSensorId)
            continue;
        if (!constraints.symmetric_only || !r.symmetry_partner) {
            units.push_back({{r.sensor_id}, {r.joint_id}});
            continue;
        }
        const int p = *r.symmetry_partner;
        if (!table.contains(p) || p < r.sensor_id)
            continue;
        const int pj = table.at(p).joint_id;
        if (constraints.one_per_segment && pj == r.joint_id)
            continue;
        units.push_back({{r.sensor_id, p}, {r.joint_id, pj}});
    }

    Enumerator e{units, constraints.one_per_segment, static_cast<std::size_t>(constraints.max_sensors), {}, {}, {}};
    if (constraints.require_root) {
        e.current.push_back(kRootSensorId);
        e.used_joints.push_back(table.at(kRootSensorId).joint_id);
    }
    e.run(0);
    std::sort(e.out.begin(), e.out.end());
    return std::move(e.out);
}

} // namespace imudse
