#pragma once

#include <json.hpp>

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace fracsens::report {

// 17 significant digits, shortest exponent form; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

// Serializes with every floating value at 17 significant digits; non-finite numbers become null.
std::string to_json(const nlohmann::ordered_json& value, int indent = 2);

struct Column {
    std::string name;
    std::vector<double> values;
};

// Columns must have equal length.
void write_csv(std::ostream& out, std::span<const Column> columns);
std::string to_csv(std::span<const Column> columns);

// Writes to the file when a path is given, otherwise to `fallback`.
void emit(const std::optional<std::string>& path, const std::string& text, std::ostream& fallback);

}  // namespace fracsens::report
