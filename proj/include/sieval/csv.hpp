#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sieval::csv {

using Row = std::vector<std::string>;

// RFC 4180: fields containing comma, quote, CR or LF are quoted, embedded
// quotes doubled. Rows end with CRLF.
std::string format_row(const Row& row);
std::string format_table(const Row& header, const std::vector<Row>& rows);

// Parses RFC 4180 text (CRLF or LF line endings). Throws ValidationError on
// an unterminated quoted field.
std::vector<Row> parse(std::string_view text);

// Shortest round-trip decimal form of a double.
std::string format_double(double value);

}  // namespace sieval::csv
