#include "json_util.hpp"

#include <fstream>

namespace imudse::detail {

json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError(fmt::format("cannot open '{}'", path.string()));
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(fmt::format("{}: malformed document (byte {}): {}", path.string(), e.byte, e.what()));
    }
}

void write_json_file(const json& doc, const std::filesystem::path& path)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw RuntimeFailure(fmt::format("cannot write '{}'", path.string()));
    out << doc.dump(1) << '\n';
    if (!out)
        throw RuntimeFailure(fmt::format("write failed for '{}'", path.string()));
}

std::string join_path(std::string_view where, std::string_view key)
{
    if (where.empty())
        return std::string(key);
    return fmt::format("{}.{}", where, key);
}

const json& require(const json& obj, std::string_view key, std::string_view where)
{
    if (!obj.is_object())
        throw ValidationError(fmt::format("{}: expected an object", where.empty() ? "<root>" : where));
    auto it = obj.find(key);
    if (it == obj.end())
        throw ValidationError(fmt::format("{}: missing required field", join_path(where, key)));
    return *it;
}

Vec3 to_vec3(const json& value, std::string_view where)
{
    if (!value.is_array() || value.size() != 3)
        throw ValidationError(fmt::format("{}: expected an array of 3 numbers", where));
    Vec3 v;
    for (int i = 0; i < 3; ++i)
        v[i] = get_as<double>(value[static_cast<std::size_t>(i)], fmt::format("{}[{}]", where, i));
    return v;
}

json from_vec3(const Vec3& v)
{
    return json::array({v.x(), v.y(), v.z()});
}

} // namespace imudse::detail
