#pragma once

// Column-typed result tables with CSV and JSON serialization.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace pspin {

/// Empty cells (monostate) mark values that do not exist for a row.
using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct Table {
    std::string kind;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    Table() = default;
    Table(std::string k, std::vector<std::string> cols) : kind(std::move(k)), columns(std::move(cols)) {}

    void add_row(std::vector<Cell> row) {
        if (row.size() != columns.size())
            throw std::invalid_argument("Table::add_row: expected " + std::to_string(columns.size()) + " cells, got " +
                                        std::to_string(row.size()));
        rows.push_back(std::move(row));
    }

    std::size_t column_index(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw std::out_of_range("Table: no column '" + name + "'");
    }

    std::string header() const {
        std::string out;
        for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
        return out;
    }

    friend bool operator==(const Table&, const Table&) = default;
};

inline std::vector<std::string> split_schema(const std::string& schema) {
    std::vector<std::string> out;
    std::stringstream ss(schema);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(item);
    return out;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

inline std::string cell_to_text(const Cell& c) {
    struct Visitor {
        std::string operator()(std::monostate) const { return ""; }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(const std::string& v) const { return csv_escape(v); }
    };
    return std::visit(Visitor{}, c);
}

inline void write_csv(const Table& t, std::ostream& os) {
    os << t.header() << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_to_text(row[i]);
        os << '\n';
    }
}

inline std::string to_csv(const Table& t) {
    std::ostringstream os;
    write_csv(t, os);
    return os.str();
}

inline nlohmann::json cell_to_json(const Cell& c) {
    struct Visitor {
        nlohmann::json operator()(std::monostate) const { return nullptr; }
        nlohmann::json operator()(std::int64_t v) const { return v; }
        nlohmann::json operator()(double v) const { return v; }
        nlohmann::json operator()(const std::string& v) const { return v; }
    };
    return std::visit(Visitor{}, c);
}

inline Cell cell_from_json(const nlohmann::json& j) {
    if (j.is_null()) return std::monostate{};
    if (j.is_number_float()) return j.get<double>();
    if (j.is_number_unsigned()) return static_cast<std::int64_t>(j.get<std::uint64_t>());
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_string()) return j.get<std::string>();
    throw std::invalid_argument("table: unsupported JSON cell " + j.dump());
}

/// {"kind", "config", "columns", "rows"}; config is stored verbatim.
inline nlohmann::json table_to_json(const Table& t, const nlohmann::json& config = nlohmann::json::object()) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& c : row) r.push_back(cell_to_json(c));
        rows.push_back(std::move(r));
    }
    return {{"kind", t.kind}, {"config", config}, {"columns", t.columns}, {"rows", std::move(rows)}};
}

inline Table table_from_json(const nlohmann::json& j) {
    Table t(j.at("kind").get<std::string>(), j.at("columns").get<std::vector<std::string>>());
    for (const auto& r : j.at("rows")) {
        std::vector<Cell> row;
        for (const auto& c : r) row.push_back(cell_from_json(c));
        t.add_row(std::move(row));
    }
    return t;
}

enum class OutputFormat { Csv, Json };

inline OutputFormat parse_format(const std::string& s) {
    if (s == "csv") return OutputFormat::Csv;
    if (s == "json") return OutputFormat::Json;
    throw std::invalid_argument("unknown output format '" + s + "' (expected csv or json)");
}

inline void write_table(const Table& t, OutputFormat format, std::ostream& os,
                        const nlohmann::json& config = nlohmann::json::object()) {
    if (format == OutputFormat::Csv)
        write_csv(t, os);
    else
        os << table_to_json(t, config).dump(2) << '\n';
}

/// Writes the table to `path`. I/O errors are reported with the path.
inline void emit_results(const Table& t, OutputFormat format, const std::filesystem::path& path,
                         const nlohmann::json& config = nlohmann::json::object()) {
    if (t.rows.empty()) throw std::invalid_argument("emit_results: table is empty");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("emit_results: cannot open '" + path.string() + "' for writing");
    write_table(t, format, os, config);
    os.flush();
    if (!os) throw std::runtime_error("emit_results: write to '" + path.string() + "' failed");
}

inline Table read_json_table(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_json_table: cannot open '" + path.string() + "'");
    try {
        return table_from_json(nlohmann::json::parse(is));
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("read_json_table: '" + path.string() + "': " + e.what());
    }
}

}  // namespace pspin
