#pragma once

// Serialization of command results as CSV or JSON records.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace vacmass::cli {

inline constexpr const char* schema_version = "1";

inline std::string format_number(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

/// RFC 4180 field quoting.
inline std::string csv_field(const std::string& text)
{
    if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

struct Column {
    std::string name;
    std::vector<double> values;
};

/// Everything a command emits: the parameter echo plus named numeric columns.
struct OutputRecord {
    std::string command;
    std::vector<std::pair<std::string, std::string>> parameters;
    std::vector<Column> columns;

    void param(std::string key, std::string value) { parameters.emplace_back(std::move(key), std::move(value)); }
    void param(std::string key, double value) { param(std::move(key), format_number(value)); }

    nlohmann::ordered_json to_json() const
    {
        nlohmann::ordered_json j;
        j["schema_version"] = schema_version;
        j["command"] = command;
        j["parameters"] = nlohmann::ordered_json::object();
        for (const auto& [k, v] : parameters) j["parameters"][k] = v;
        j["columns"] = nlohmann::ordered_json::object();
        for (const auto& c : columns) j["columns"][c.name] = c.values;
        return j;
    }

    /// Parameter echo as '#' comment lines, then a header row and one row per sample.
    std::string to_csv() const
    {
        std::ostringstream os;
        os << "# schema_version=" << schema_version << '\n';
        os << "# command=" << command << '\n';
        for (const auto& [k, v] : parameters) os << "# " << k << '=' << v << '\n';
        for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << csv_field(columns[i].name);
        os << '\n';
        const std::size_t rows = columns.empty() ? 0 : columns.front().values.size();
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << format_number(columns[i].values[r]);
            os << '\n';
        }
        return os.str();
    }

    std::string render(const std::string& format) const
    {
        if (format == "json") return to_json().dump(2) + "\n";
        return to_csv();
    }
};

/// Writes to `path`, or stdout when it is empty.
inline void emit(const std::string& text, const std::string& path)
{
    if (path.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file " + path);
    file << text;
}

}  // namespace vacmass::cli
