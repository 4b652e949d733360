#include "laborcast/csv_io.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "laborcast/errors.hpp"

namespace laborcast {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

DateStamp parse_date(const std::string& cell, std::size_t line_no) {
    int m = 0, d = 0, y = 0;
    char extra = 0;
    if (std::sscanf(cell.c_str(), "%d/%d/%d%c", &m, &d, &y, &extra) != 3 || m < 1 || m > 12 ||
        d < 1 || d > 31 || y < 1)
        throw FormatError("line " + std::to_string(line_no) + ": cannot parse date '" + cell +
                          "' as M/D/YYYY");
    return DateStamp{y, m};
}

double parse_number(const std::string& cell, const std::string& column, std::size_t line_no) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0' || errno == ERANGE)
        throw FormatError("line " + std::to_string(line_no) + ", column '" + column +
                          "': cannot parse '" + cell + "' as a number");
    return v;
}

} // namespace

FeatureMatrix load_panel_csv(const std::string& path, const std::string& date_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) text.erase(0, 3);

    std::vector<std::string> lines;
    {
        std::string cur;
        for (char c : text) {
            if (c == '\n') {
                if (!cur.empty() && cur.back() == '\r') cur.pop_back();
                lines.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        if (!cur.empty()) {
            if (cur.back() == '\r') cur.pop_back();
            lines.push_back(cur);
        }
    }
    if (lines.empty()) throw FormatError("'" + path + "' is empty, expected a header row");

    const auto header = split_csv_line(lines[0]);
    if (trim(header[0]) != date_column)
        throw FormatError("first header cell is '" + trim(header[0]) + "', expected date column '" +
                          date_column + "'");

    FeatureMatrix m;
    for (std::size_t c = 1; c < header.size(); ++c) {
        const std::string name = trim(header[c]);
        if (name.empty())
            throw FormatError("header cell " + std::to_string(c + 1) + " is empty");
        if (m.has_column(name)) throw FormatError("duplicate column name '" + name + "'");
        m.names.push_back(name);
    }
    m.columns.resize(m.names.size());

    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (trim(lines[li]).empty()) continue;
        const std::size_t line_no = li + 1;
        const auto cells = split_csv_line(lines[li]);
        if (cells.size() != header.size())
            throw FormatError("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(header.size()) + " cells, found " +
                              std::to_string(cells.size()));
        const DateStamp date = parse_date(trim(cells[0]), line_no);
        if (!m.dates.empty()) {
            const auto prev = m.dates.back().month_index();
            if (date.month_index() == prev)
                throw DuplicateDateError("line " + std::to_string(line_no) + ": duplicate month " +
                                         date.to_string());
            if (date.month_index() < prev)
                throw DateOrderError("line " + std::to_string(line_no) + ": date " +
                                     date.to_string() + " is not after " +
                                     m.dates.back().to_string());
            if (date.month_index() != prev + 1)
                throw DateOrderError("line " + std::to_string(line_no) + ": month gap between " +
                                     m.dates.back().to_string() + " and " + date.to_string());
        }
        m.dates.push_back(date);
        for (std::size_t c = 0; c < m.names.size(); ++c) {
            const std::string cell = trim(cells[c + 1]);
            if (cell.empty())
                m.columns[c].push_back(std::nullopt);
            else
                m.columns[c].push_back(parse_number(cell, m.names[c], line_no));
        }
    }
    return m;
}

void save_panel_csv(const FeatureMatrix& matrix, const std::string& path,
                    const std::string& date_column) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write '" + path + "'");
    out << date_column;
    for (const auto& name : matrix.names) out << ',' << name;
    out << '\n';
    for (std::size_t r = 0; r < matrix.n_rows(); ++r) {
        const DateStamp& d = matrix.dates[r];
        out << d.month << '/' << d.last_day() << '/' << d.year;
        for (std::size_t c = 0; c < matrix.n_cols(); ++c) {
            out << ',';
            if (matrix.columns[c][r]) out << format_double(*matrix.columns[c][r]);
        }
        out << '\n';
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace laborcast
