#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "extlab/errors.hpp"

namespace extlab {

// Rectangular text table: one header row of column names, then data rows.
// Cells are kept as strings so numeric and tag columns share one container;
// format_real/parse_real do the lossless double conversion.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t cols() const { return header.size(); }
    std::size_t size() const { return rows.size(); }
};

// 17 significant digits round-trips every finite double exactly.
inline std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline double parse_real(const std::string& cell) {
    if (cell.empty())
        throw SchemaMismatch("empty numeric cell");
    char* end = nullptr;
    const double x = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size())
        throw SchemaMismatch("cell is not a number: '" + cell + "'");
    return x;
}

inline long parse_integer(const std::string& cell) {
    if (cell.empty())
        throw SchemaMismatch("empty integer cell");
    char* end = nullptr;
    const long v = std::strtol(cell.c_str(), &end, 10);
    if (end != cell.c_str() + cell.size())
        throw SchemaMismatch("cell is not an integer: '" + cell + "'");
    return v;
}

namespace detail {

inline void append_joined(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t j = 0; j < cells.size(); ++j) {
        if (j)
            out += ',';
        out += cells[j];
    }
    out += '\n';
}

} // namespace detail

// Atomic write: the table is serialized to <path>.tmp and renamed into place,
// so an interrupted run never leaves a partial artifact at the target path.
// Comma separated, LF line endings, no trailing separator.
inline void write_csv(const CsvTable& table, const std::filesystem::path& path) {
    if (table.header.empty())
        throw SchemaMismatch("table needs a header row");
    std::string body;
    detail::append_joined(body, table.header);
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            throw SchemaMismatch("ragged row in table");
        detail::append_joined(body, row);
    }
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw SchemaMismatch("cannot open for writing: " + tmp.string());
        out.write(body.data(), static_cast<std::streamsize>(body.size()));
        if (!out)
            throw SchemaMismatch("short write: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw SchemaMismatch("cannot open: " + path.string());
    CsvTable table;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) {
                cells.push_back(line.substr(start));
                break;
            }
            cells.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        if (table.header.empty()) {
            table.header = std::move(cells);
        } else {
            if (cells.size() != table.header.size())
                throw SchemaMismatch("ragged row in " + path.string());
            table.rows.push_back(std::move(cells));
        }
    }
    if (table.header.empty())
        throw SchemaMismatch("no header row in " + path.string());
    return table;
}

inline void require_header(const CsvTable& table,
                           const std::vector<std::string>& expected,
                           const std::string& kind) {
    if (table.header != expected) {
        std::string got;
        detail::append_joined(got, table.header);
        got.pop_back();
        throw SchemaMismatch(kind + " schema expects different columns, got: " + got);
    }
}

} // namespace extlab
