#include "fracsens/report.hpp"

#include "fracsens/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fracsens::report {

namespace {

void escape(std::string& out, const std::string& s) {
    out += '"';
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    out += '"';
}

void write(std::string& out, const nlohmann::ordered_json& v, int indent, int depth) {
    const auto newline = [&](int d) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (v.type()) {
        case nlohmann::json::value_t::object: {
            if (v.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (const auto& [key, item] : v.items()) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                escape(out, key);
                out += indent < 0 ? ":" : ": ";
                write(out, item, indent, depth + 1);
            }
            newline(depth);
            out += '}';
            return;
        }
        case nlohmann::json::value_t::array: {
            if (v.empty()) {
                out += "[]";
                return;
            }
            out += '[';
            bool first = true;
            for (const auto& item : v) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                write(out, item, indent, depth + 1);
            }
            newline(depth);
            out += ']';
            return;
        }
        case nlohmann::json::value_t::number_float: {
            const double d = v.get<double>();
            out += std::isfinite(d) ? format_double(d) : "null";
            return;
        }
        case nlohmann::json::value_t::string:
            escape(out, v.get<std::string>());
            return;
        default:
            out += v.dump();
    }
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string to_json(const nlohmann::ordered_json& value, int indent) {
    std::string out;
    write(out, value, indent, 0);
    if (indent >= 0) out += '\n';
    return out;
}

void write_csv(std::ostream& out, std::span<const Column> columns) {
    if (columns.empty()) return;
    const std::size_t rows = columns.front().values.size();
    for (const auto& c : columns)
        if (c.values.size() != rows) throw ValidationError("write_csv: column " + c.name + " has a different length");
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i].name;
    out << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t i = 0; i < columns.size(); ++i)
            out << (i ? "," : "") << format_double(columns[i].values[r]);
        out << '\n';
    }
}

std::string to_csv(std::span<const Column> columns) {
    std::ostringstream ss;
    write_csv(ss, columns);
    return ss.str();
}

void emit(const std::optional<std::string>& path, const std::string& text, std::ostream& fallback) {
    if (!path) {
        fallback << text;
        return;
    }
    std::ofstream out(*path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + *path);
    out << text;
    if (!out) throw ValidationError("write failed for " + *path);
}

}  // namespace fracsens::report
