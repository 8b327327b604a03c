#pragma once

// Tabular output shared by the command-line tools: a CSV layout
//   # kerr-bic v<version> <command>
//   col1,col2,...
//   rows...
//   # key=value        (optional summary lines)
// with reals written at 17 significant digits, and a JSON mirror. The reader
// restores every value bit for bit.

#include <iosfwd>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace kerr_bic {

inline constexpr const char* kVersion = "0.1.0";

using Cell = std::variant<double, std::string>;

struct Table {
    std::string command;
    std::string version = kVersion;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::pair<std::string, Cell>> summary;

    void add_row(std::vector<Cell> row);
    std::size_t column(const std::string& name) const;  // throws std::out_of_range
    double number(std::size_t row, const std::string& name) const;
    const std::string& text(std::size_t row, const std::string& name) const;
};

// Shortest text that reads back to the same double (17 significant digits).
std::string format_real(double v);

void write_csv(std::ostream& out, const Table& table);
void write_json(std::ostream& out, const Table& table);

// Parses the CSV layout above. Cells that read fully as a number become
// doubles, everything else stays text. Throws std::runtime_error on a
// malformed header or ragged rows.
Table read_csv(std::istream& in);

}  // namespace kerr_bic
