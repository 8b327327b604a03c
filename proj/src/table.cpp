#include "kerr_bic/table.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace kerr_bic {

namespace {

std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_real(*d);
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\n") != std::string::npos) {
        throw std::invalid_argument("table cell text may not contain commas or newlines: " + s);
    }
    return s;
}

Cell parse_cell(const std::string& s) {
    if (s.empty()) return s;
    if (s == "nan") return std::nan("");
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() + s.size()) return v;
    return s;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

nlohmann::ordered_json to_json(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
        if (std::isfinite(*d)) return *d;
        return format_real(*d);  // JSON has no inf/nan
    }
    return std::get<std::string>(c);
}

}  // namespace

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
        throw std::invalid_argument("Table::add_row: expected " + std::to_string(columns.size()) + " cells, got " +
                                    std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& name) const {
    for (std::size_t k = 0; k < columns.size(); ++k) {
        if (columns[k] == name) return k;
    }
    throw std::out_of_range("no column named " + name);
}

double Table::number(std::size_t row, const std::string& name) const {
    return std::get<double>(rows.at(row).at(column(name)));
}

const std::string& Table::text(std::size_t row, const std::string& name) const {
    return std::get<std::string>(rows.at(row).at(column(name)));
}

void write_csv(std::ostream& out, const Table& table) {
    out << "# kerr-bic v" << table.version << ' ' << table.command << '\n';
    for (std::size_t k = 0; k < table.columns.size(); ++k) out << (k ? "," : "") << table.columns[k];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << cell_text(row[k]);
        out << '\n';
    }
    for (const auto& [key, value] : table.summary) out << "# " << key << '=' << cell_text(value) << '\n';
}

void write_json(std::ostream& out, const Table& table) {
    nlohmann::ordered_json doc;
    doc["header"] = "kerr-bic v" + table.version + " " + table.command;
    auto records = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json rec = nlohmann::ordered_json::object();
        for (std::size_t k = 0; k < row.size(); ++k) rec[table.columns[k]] = to_json(row[k]);
        records.push_back(std::move(rec));
    }
    doc["records"] = std::move(records);
    if (!table.summary.empty()) {
        nlohmann::ordered_json sum = nlohmann::ordered_json::object();
        for (const auto& [key, value] : table.summary) sum[key] = to_json(value);
        doc["summary"] = std::move(sum);
    }
    out << doc.dump(2) << '\n';
}

Table read_csv(std::istream& in) {
    Table t;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty input");
    const std::string prefix = "# kerr-bic v";
    if (line.rfind(prefix, 0) != 0) throw std::runtime_error("read_csv: missing kerr-bic header");
    {
        std::istringstream head(line.substr(prefix.size()));
        head >> t.version >> t.command;
        if (t.command.empty()) throw std::runtime_error("read_csv: header without command");
    }
    if (!std::getline(in, line)) throw std::runtime_error("read_csv: missing column line");
    t.columns = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("# ", 0) == 0) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw std::runtime_error("read_csv: malformed summary line: " + line);
            t.summary.emplace_back(line.substr(2, eq - 2), parse_cell(line.substr(eq + 1)));
            continue;
        }
        const auto fields = split(line);
        if (fields.size() != t.columns.size()) throw std::runtime_error("read_csv: ragged row: " + line);
        std::vector<Cell> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_cell(f));
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace kerr_bic
