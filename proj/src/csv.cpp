#include "sislab/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>

#include "sislab/errors.hpp"

namespace sislab::csvio {

std::string format_full(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v)
            break;
    }
    return buf;
}

double parse_double(const std::string& token, const std::string& what) {
    const char* begin = token.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw ValidationError("cannot parse " + what + " from \"" + token + "\"");
    return v;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

std::vector<std::vector<std::string>> read_table(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        for (;;) {
            std::size_t comma = t.find(',', start);
            if (comma == std::string::npos) {
                cells.push_back(trim(t.substr(start)));
                break;
            }
            cells.push_back(trim(t.substr(start, comma - start)));
            start = comma + 1;
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

void write_columns(std::ostream& out, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns) {
    if (header.size() != columns.size())
        throw ValidationError("csv write: header and column counts differ");
    std::size_t n = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns)
        if (c.size() != n)
            throw ValidationError("csv write: ragged columns");
    for (std::size_t j = 0; j < header.size(); ++j)
        out << (j ? "," : "") << header[j];
    out << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j)
            out << (j ? "," : "") << format_full(columns[j][i]);
        out << '\n';
    }
}

} // namespace sislab::csvio
