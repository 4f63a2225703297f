#pragma once

// Report writers. Field order is insertion order; every double is printed
// with %.17g so regression diffs are exact. Non-finite numbers become null.

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace bcft::report {

using json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

inline std::string format_double(double x)
{
    if (!std::isfinite(x)) return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline void write(const json& j, std::string& out, int indent, int depth)
{
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += pad + json(it.key()).dump() + ": ";
            write(it.value(), out, indent, depth + 1);
        }
        out += "\n" + close + "}";
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) out += ",\n";
            out += pad;
            write(j[i], out, indent, depth + 1);
        }
        out += "\n" + close + "]";
        return;
    }
    case json::value_t::number_float: out += format_double(j.get<double>()); return;
    default: out += j.dump(); return;
    }
}

}  // namespace detail

inline std::string dump(const json& j, int indent = 2)
{
    std::string out;
    detail::write(j, out, indent, 0);
    out += "\n";
    return out;
}

inline json complex_json(std::complex<double> z)
{
    return {{"re", z.real()}, {"im", z.imag()}, {"abs", std::abs(z)}};
}

/// Summary skeleton; always carries the schema version.
inline json summary(const std::string& command)
{
    json j;
    j["schema_version"] = schema_version;
    if (!command.empty()) j["command"] = command;
    return j;
}

struct CsvRow {
    double a = 0.0;
    std::complex<double> value;
    double deficit = 0.0;
};

inline constexpr const char* csv_header = "a,re,im,abs,deficit";

inline std::string csv(const std::vector<CsvRow>& rows)
{
    std::string out = std::string(csv_header) + "\n";
    for (const auto& r : rows) {
        out += format_double(r.a) + "," + format_double(r.value.real()) + "," + format_double(r.value.imag()) + "," +
            format_double(std::abs(r.value)) + "," + format_double(r.deficit) + "\n";
    }
    return out;
}

/// Writes `text` to `path`; false if the file cannot be written.
inline bool write_file(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) return false;
    f << text;
    f.close();
    return static_cast<bool>(f);
}

}  // namespace bcft::report
