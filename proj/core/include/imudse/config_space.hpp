#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace imudse {

inline constexpr int kRootSensorId = 0;

struct SensorSpec {
    int sensor_id = 0;
    int vertex_id = 0;
    int joint_id = 0;
    double dist_from_root = 0.0; ///< meters
    std::optional<int> symmetry_partner;
};

/// Rows of the basic sensor table. Lookups are by sensor id, not position.
class SensorTable {
public:
    SensorTable() = default;
    /// Throws ValidationError on duplicate ids, non-involutive partners or a
    /// partnered root.
    explicit SensorTable(std::vector<SensorSpec> rows);

    [[nodiscard]] const std::vector<SensorSpec>& rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }
    [[nodiscard]] bool contains(int sensor_id) const noexcept;
    /// Throws ValidationError for an unknown id.
    [[nodiscard]] const SensorSpec& at(int sensor_id) const;

    /// Keeps only the listed ids (which must exist), preserving table order.
    [[nodiscard]] SensorTable restricted_to(const std::vector<int>& ids) const;

private:
    std::vector<SensorSpec> rows_;
};

/// The 25-sensor basic configuration, sorted by distance from the root.
SensorTable default_sensor_table();

SensorTable load_sensor_table(const std::filesystem::path& path);
void save_sensor_table(const SensorTable& table, const std::filesystem::path& path);

struct Constraints {
    int max_sensors = 10;
    bool require_root = true;
    bool one_per_segment = true; ///< segments keyed by joint id
    bool symmetric_only = true;

    void validate() const;
};

/// Sorted, duplicate-free sensor ids.
struct SensorConfiguration {
    std::vector<int> sensor_ids;

    SensorConfiguration() = default;
    /// Sorts the ids. Duplicates are kept so validation can report them.
    explicit SensorConfiguration(std::vector<int> ids);

    [[nodiscard]] std::size_t count() const noexcept { return sensor_ids.size(); }
    [[nodiscard]] bool contains(int id) const noexcept;

    friend auto operator<=>(const SensorConfiguration& a, const SensorConfiguration& b)
    {
        if (a.count() != b.count())
            return a.count() <=> b.count();
        return a.sensor_ids <=> b.sensor_ids;
    }
    friend bool operator==(const SensorConfiguration&, const SensorConfiguration&) = default;
};

/// "[0, 2, 16, 17]"
std::string to_string(const SensorConfiguration& config);
/// Parses "0,2,16,17", "0;2;16;17", "[0, 2, 16, 17]" or space separated ids.
SensorConfiguration parse_configuration(const std::string& text);

struct ValidationResult {
    bool valid = true;
    std::vector<std::string> violations;
};

/// Reports every violated constraint. Throws ValidationError for an id that
/// is not in the table.
ValidationResult validate_configuration(const SensorConfiguration& config, const SensorTable& table,
                                        const Constraints& constraints);

/// All configurations passing validate_configuration, each once, ordered by
/// (count, ids).
std::vector<SensorConfiguration> enumerate_configurations(const SensorTable& table, const Constraints& constraints);

} // namespace imudse
