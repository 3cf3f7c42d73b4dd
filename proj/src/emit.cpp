// SPDX-License-Identifier: Apache-2.0
//
// rismm - link-level simulation and optimization for RIS-assisted mmWave downlinks
// ------------------------------------------------------------------------

#include <rismm/scenario.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>

namespace rismm
{
    namespace
    {
        std::string format_number(double v)
        {
            if (std::isnan(v))
                return "nan";
            if (std::isinf(v))
                return v > 0 ? "inf" : "-inf";
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }

        std::string quote(const std::string &s)
        {
            if (s.find_first_of(",\"\r\n") == std::string::npos)
                return s;
            std::string out = "\"";
            for (char c : s)
            {
                if (c == '"')
                    out += '"';
                out += c;
            }
            return out + '"';
        }

        MetricValue find_metric(const RunResult &row, const std::string &name)
        {
            for (const auto &[k, v] : row.metrics)
                if (k == name)
                    return v;
            return std::nullopt;
        }

        std::vector<std::vector<std::string>> split_records(std::string_view text)
        {
            std::vector<std::vector<std::string>> records;
            std::vector<std::string> fields;
            std::string field;
            bool quoted = false;
            bool any = false;
            for (std::size_t i = 0; i < text.size(); ++i)
            {
                const char c = text[i];
                if (quoted)
                {
                    if (c == '"')
                    {
                        if (i + 1 < text.size() && text[i + 1] == '"')
                        {
                            field += '"';
                            ++i;
                        }
                        else
                            quoted = false;
                    }
                    else
                        field += c;
                    continue;
                }
                if (c == '"')
                {
                    quoted = true;
                    any = true;
                }
                else if (c == ',')
                {
                    fields.push_back(std::move(field));
                    field.clear();
                    any = true;
                }
                else if (c == '\r' || c == '\n')
                {
                    if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n')
                        ++i;
                    if (any || !field.empty())
                    {
                        fields.push_back(std::move(field));
                        records.push_back(std::move(fields));
                    }
                    fields.clear();
                    field.clear();
                    any = false;
                }
                else
                {
                    field += c;
                    any = true;
                }
            }
            require(!quoted, "parse_csv: unterminated quoted field");
            if (any || !field.empty())
            {
                fields.push_back(std::move(field));
                records.push_back(std::move(fields));
            }
            return records;
        }

        double parse_number(const std::string &s)
        {
            if (s == "nan")
                return std::nan("");
            if (s == "inf")
                return std::numeric_limits<double>::infinity();
            if (s == "-inf")
                return -std::numeric_limits<double>::infinity();
            char *end = nullptr;
            const double v = std::strtod(s.c_str(), &end);
            require(end != s.c_str() && *end == '\0', "parse_csv: not a number: " + s);
            return v;
        }
    }

    std::string to_csv(const ResultTable &table)
    {
        const auto cols = table.columns();
        std::string out;
        for (std::size_t i = 0; i < cols.size(); ++i)
            out += (i ? "," : "") + quote(cols[i]);
        out += "\r\n";

        for (const auto &row : table.rows)
        {
            std::vector<std::string> fields{quote(row.scenario_id), std::to_string(row.seed), quote(table.sweep_variable),
                                            row.sweep_value ? format_number(*row.sweep_value) : "",
                                            std::to_string(row.trial), quote(row.status),
                                            std::to_string(row.iterations)};
            for (std::size_t i = fields.size(); i < cols.size(); ++i)
            {
                if (cols[i] == "wall_time_s")
                {
                    fields.push_back(format_number(row.wall_time_s));
                    continue;
                }
                const auto v = find_metric(row, cols[i]);
                fields.push_back(v ? format_number(*v) : "");
            }
            for (std::size_t i = 0; i < fields.size(); ++i)
                out += (i ? "," : "") + fields[i];
            out += "\r\n";
        }
        return out;
    }

    std::string to_json(const ResultTable &table)
    {
        const auto cols = table.columns();
        auto number = [](std::optional<double> v) -> nlohmann::ordered_json
        {
            if (!v || !std::isfinite(*v))
                return nullptr;
            return *v;
        };

        auto out = nlohmann::ordered_json::array();
        for (const auto &row : table.rows)
        {
            nlohmann::ordered_json obj;
            obj["scenario_id"] = row.scenario_id;
            obj["seed"] = row.seed;
            obj["sweep_variable"] = table.sweep_variable;
            obj["sweep_value"] = number(row.sweep_value);
            obj["trial"] = row.trial;
            obj["status"] = row.status;
            obj["iterations"] = row.iterations;
            for (std::size_t i = 7; i < cols.size(); ++i)
                obj[cols[i]] = cols[i] == "wall_time_s" ? number(row.wall_time_s) : number(find_metric(row, cols[i]));
            out.push_back(std::move(obj));
        }
        return out.dump(2) + "\n";
    }

    void emit(const ResultTable &table, OutputFormat format, const std::filesystem::path &path)
    {
        require(!table.rows.empty(), "emit: no results to write");
        const std::string text = format == OutputFormat::csv ? to_csv(table) : to_json(table);
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f)
            throw InvalidArgument("emit: cannot open " + path.string() + " for writing");
        f << text;
        f.flush();
        if (!f)
            throw InvalidArgument("emit: write to " + path.string() + " failed");
    }

    ResultTable parse_csv(std::string_view text)
    {
        const auto records = split_records(text);
        require(!records.empty(), "parse_csv: missing header");
        const auto &header = records.front();
        const std::vector<std::string> ids{"scenario_id", "seed", "sweep_variable", "sweep_value", "trial", "status", "iterations"};
        require(header.size() >= ids.size() && std::equal(ids.begin(), ids.end(), header.begin()),
                "parse_csv: unexpected identifier columns");

        ResultTable table;
        table.timing = header.back() == "wall_time_s";
        const std::size_t metric_end = header.size() - (table.timing ? 1 : 0);
        for (std::size_t r = 1; r < records.size(); ++r)
        {
            const auto &f = records[r];
            require(f.size() == header.size(), "parse_csv: row " + std::to_string(r) + " has the wrong field count");
            RunResult row;
            row.scenario_id = f[0];
            row.seed = std::stoull(f[1]);
            table.sweep_variable = f[2];
            if (!f[3].empty())
                row.sweep_value = parse_number(f[3]);
            row.trial = std::stoi(f[4]);
            row.status = f[5];
            row.iterations = std::stoi(f[6]);
            for (std::size_t i = ids.size(); i < metric_end; ++i)
                row.metrics.emplace_back(header[i], f[i].empty() ? MetricValue{} : MetricValue{parse_number(f[i])});
            if (table.timing)
                row.wall_time_s = parse_number(f.back());
            table.rows.push_back(std::move(row));
        }
        return table;
    }
}
