#ifndef ENTREL_CSV_HPP
#define ENTREL_CSV_HPP

// Minimal RFC 4180 style CSV: comma delimiter, quotes only when needed.

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace entrel::csv {

std::string quote(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Reads one record (quoted fields may span lines). nullopt at end of input.
std::optional<std::vector<std::string>> read_row(std::istream& in);

}  // namespace entrel::csv

#endif  // ENTREL_CSV_HPP
