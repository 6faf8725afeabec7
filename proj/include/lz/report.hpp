#pragma once

#include <string>
#include <vector>

namespace lz {

// Homogeneous numeric table; every row has one value per column.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// "csv": header row plus rows, 16 significant digits. "json": array of objects in column order,
// shortest round-trip doubles.
std::string format_table(const Table& table, const std::string& format);
// Writes format_table to `path`; I/O failures throw std::runtime_error naming the path.
void emit_table(const Table& table, const std::string& format, const std::string& path);
Table parse_table_json(const std::string& text);

std::string format_number(double v);  // %.16g, with nan/inf spelled out

}  // namespace lz
