#pragma once

// Internal helpers shared by the JSON-backed file formats.

#include <filesystem>
#include <string>
#include <string_view>
#include <type_traits>

#include <fmt/format.h>
#include <json.hpp>

#include "imudse/error.hpp"
#include "imudse/rotation.hpp"

namespace imudse::detail {

using json = nlohmann::json;

json read_json_file(const std::filesystem::path& path);
void write_json_file(const json& doc, const std::filesystem::path& path);

/// Fetches a required member, reporting `where.key` on failure.
const json& require(const json& obj, std::string_view key, std::string_view where);

std::string join_path(std::string_view where, std::string_view key);

template <typename T>
T get_as(const json& value, std::string_view where)
{
    bool ok = false;
    std::string_view label = "value";
    if constexpr (std::is_same_v<T, bool>) {
        ok = value.is_boolean();
        label = "boolean";
    } else if constexpr (std::is_integral_v<T>) {
        ok = value.is_number_integer();
        label = "integer";
    } else if constexpr (std::is_floating_point_v<T>) {
        ok = value.is_number();
        label = "number";
    } else if constexpr (std::is_same_v<T, std::string>) {
        ok = value.is_string();
        label = "string";
    } else {
        ok = true;
    }
    if (!ok)
        throw ValidationError(fmt::format("{}: expected {}, got {}", where, label, value.dump()));
    try {
        return value.get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(fmt::format("{}: {}", where, e.what()));
    }
}

Vec3 to_vec3(const json& value, std::string_view where);
json from_vec3(const Vec3& v);

} // namespace imudse::detail
