#include "lz/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace lz {

namespace {

void check(const Table& t) {
    for (const auto& row : t.rows)
        if (row.size() != t.columns.size()) throw std::invalid_argument("table: row width differs from header");
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.16g", v);
    return buf;
}

std::string format_table(const Table& table, const std::string& format) {
    check(table);
    if (format == "csv") {
        std::ostringstream os;
        for (size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << table.columns[c];
        os << "\n";
        for (const auto& row : table.rows) {
            for (size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_number(row[c]);
            os << "\n";
        }
        return os.str();
    }
    if (format == "json") {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& row : table.rows) {
            nlohmann::ordered_json obj = nlohmann::ordered_json::object();
            for (size_t c = 0; c < row.size(); ++c) obj[table.columns[c]] = row[c];
            arr.push_back(obj);
        }
        return arr.dump(2) + "\n";
    }
    throw std::invalid_argument("table: unknown format '" + format + "'");
}

void emit_table(const Table& table, const std::string& format, const std::string& path) {
    std::string text = format_table(table, format);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

Table parse_table_json(const std::string& text) {
    auto arr = nlohmann::ordered_json::parse(text);
    if (!arr.is_array()) throw std::invalid_argument("table: JSON root must be an array");
    Table t;
    for (const auto& obj : arr) {
        if (t.columns.empty() && t.rows.empty())
            for (auto it = obj.begin(); it != obj.end(); ++it) t.columns.push_back(it.key());
        std::vector<double> row;
        for (const auto& c : t.columns) row.push_back(obj.at(c).get<double>());
        if (obj.size() != t.columns.size()) throw std::invalid_argument("table: rows are not homogeneous");
        t.rows.push_back(row);
    }
    return t;
}

}  // namespace lz
