#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace manie::csv {

/// Shortest decimal text that round-trips the double exactly.
std::string format_double(double v);

/// RFC-4180 field quoting: fields containing a comma, quote, CR or LF are
/// wrapped in double quotes with embedded quotes doubled.
std::string quote(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Splits one RFC-4180 record (no embedded newlines).
std::vector<std::string> split_row(std::string_view line);

/// One matrix row per CSV line.
void write_matrix(std::ostream& out, const Eigen::MatrixXd& m);
void write_matrix(std::ostream& out, const Eigen::MatrixXi& m);

/// Reads numeric rows until EOF or a line starting with '#'. The comment
/// line that stopped the read, if any, is stored in `stop_line`.
Eigen::MatrixXd read_matrix(std::istream& in, std::string* stop_line = nullptr);

}  // namespace manie::csv
