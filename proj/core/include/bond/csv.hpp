#ifndef BOND_CSV_HPP
#define BOND_CSV_HPP

#include <string>
#include <string_view>
#include <vector>

namespace bond {

/// RFC 4180 field: quoted when it contains a comma, quote or line break.
std::string csv_field(std::string_view value);

/// Fields joined with commas, terminated by "\n".
std::string csv_row(const std::vector<std::string>& fields);

}  // namespace bond

#endif  // BOND_CSV_HPP
