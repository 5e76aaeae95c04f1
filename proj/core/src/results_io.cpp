#include "imudse/results_io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "imudse/error.hpp"

namespace imudse {

namespace {

std::string ids_field(const SensorConfiguration& config)
{
    return fmt::format("{}", fmt::join(config.sensor_ids, " "));
}

std::string number(double v)
{
    if (std::isnan(v))
        return "nan";
    return fmt::format("{}", v);
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell.push_back(c);
        }
    }
    out.push_back(cell);
    return out;
}

double parse_double(const std::string& cell, const std::string& where)
{
    if (cell == "nan")
        return std::nan("");
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size())
        throw ValidationError(fmt::format("{}: '{}' is not a number", where, cell));
    return v;
}

int parse_int(const std::string& cell, const std::string& where)
{
    char* end = nullptr;
    const long v = std::strtol(cell.c_str(), &end, 10);
    if (cell.empty() || end != cell.c_str() + cell.size())
        throw ValidationError(fmt::format("{}: '{}' is not an integer", where, cell));
    return static_cast<int>(v);
}

} // namespace

std::string format_results_csv(const std::vector<EvaluationRecord>& records)
{
    std::string out = kResultsHeader;
    out += '\n';
    for (const auto& r : records) {
        const auto& m = r.report;
        out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", r.config_id, ids_field(r.config), r.sensor_count(),
                           number(m.sip_deg), number(m.angular_deg), number(m.positional_cm), number(m.mesh_cm),
                           number(m.jitter_km_s3), number(r.runtime_s), r.valid ? 1 : 0);
    }
    return out;
}

std::vector<EvaluationRecord> parse_results_csv(const std::string& text, const std::string& source)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw ValidationError(fmt::format("{}: empty results file", source));
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != kResultsHeader)
        throw ValidationError(fmt::format("{}: unexpected header '{}'", source, line));

    std::vector<EvaluationRecord> records;
    for (int lineno = 2; std::getline(in, line); ++lineno) {
        if (line.empty() || line == "\r")
            continue;
        const auto cells = split_csv_line(line);
        const std::string where = fmt::format("{}:{}", source, lineno);
        if (cells.size() != 10)
            throw ValidationError(fmt::format("{}: expected 10 fields, got {}", where, cells.size()));
        EvaluationRecord r;
        r.config_id = parse_int(cells[0], where);
        r.config = parse_configuration(cells[1]);
        const int count = parse_int(cells[2], where);
        if (count != r.sensor_count())
            throw ValidationError(fmt::format("{}: count {} does not match {} sensor ids", where, count, r.sensor_count()));
        r.report = {parse_double(cells[3], where), parse_double(cells[4], where), parse_double(cells[5], where),
                    parse_double(cells[6], where), parse_double(cells[7], where)};
        r.runtime_s = parse_double(cells[8], where);
        r.valid = parse_int(cells[9], where) != 0;
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<EvaluationRecord> load_results_csv(const std::filesystem::path& path)
{
    return parse_results_csv(read_text_file(path), path.string());
}

std::string format_ranking_csv(const std::vector<RankEntry>& ranking, Metric metric, double lambda)
{
    std::string out = fmt::format("rank,config_id,sensor_ids,count,metric,lambda,error,score\n");
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        const auto& e = ranking[i];
        out += fmt::format("{},{},{},{},{},{},{},{}\n", i + 1, e.config_id, ids_field(e.config), e.config.count(),
                           to_string(metric), number(lambda), number(e.error), number(e.score));
    }
    return out;
}

std::string format_best_per_count_csv(const std::vector<CountBest>& best, Metric metric)
{
    std::string out = "count,position,config_id,sensor_ids,metric,error,range_min,range_max\n";
    for (const auto& cb : best) {
        for (std::size_t i = 0; i < cb.best.size(); ++i) {
            const auto& e = cb.best[i];
            out += fmt::format("{},{},{},{},{},{},{},{}\n", cb.count, i + 1, e.config_id, ids_field(e.config),
                               to_string(metric), number(e.error), number(cb.min_error), number(cb.max_error));
        }
    }
    return out;
}

std::string format_occurrence_csv(const OccurrenceTable& table, Metric metric)
{
    std::string out = "sensor_ids,metric,best_count,worst_count\n";
    for (const auto& r : table.rows)
        out += fmt::format("{},{},{},{}\n", fmt::join(r.sensor_ids, " "), to_string(metric), r.best_count, r.worst_count);
    return out;
}

std::string format_pareto_csv(const std::vector<ParetoEntry>& front, Metric metric)
{
    std::string out = "config_id,sensor_ids,count,metric,error\n";
    for (const auto& e : front)
        out += fmt::format("{},{},{},{},{}\n", e.config_id, ids_field(e.config), e.config.count(), to_string(metric),
                           number(e.error));
    return out;
}

std::string format_lambda_sweep_csv(const std::vector<std::pair<Metric, std::vector<SweepPoint>>>& sweeps)
{
    std::string out = "metric,lambda,count,sensor_ids,scaled_error,score\n";
    for (const auto& [metric, points] : sweeps) {
        for (const auto& p : points)
            out += fmt::format("{},{},{},{},{},{}\n", to_string(metric), number(p.lambda), p.count, ids_field(p.config),
                               number(p.error), number(p.score));
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw RuntimeFailure(fmt::format("cannot write '{}'", path.string()));
    out << content;
    if (!out)
        throw RuntimeFailure(fmt::format("write failed for '{}'", path.string()));
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError(fmt::format("cannot open '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace imudse
