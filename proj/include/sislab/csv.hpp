#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sislab::csvio {

/// Shortest decimal form that round-trips the exact double (printf %.17g
/// trimmed via %g semantics is not round-trip safe; this is).
std::string format_full(double v);

/// Strict double parse: the whole token must be consumed.
double parse_double(const std::string& token, const std::string& what);

/// Comma-split table reader.  Skips blank lines and lines starting with '#';
/// trims surrounding whitespace from each cell.  No quoting (none of the file
/// formats here need it).
std::vector<std::vector<std::string>> read_table(std::istream& in);

/// Writes header + column-major data as CSV with full-precision numbers.
/// All columns must share one length.
void write_columns(std::ostream& out, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns);

} // namespace sislab::csvio
