#include "manie/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <system_error>

#include "manie/error.hpp"

namespace manie::csv {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw FormatError("cannot format double");
  return std::string(buf, ptr);
}

std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << quote(fields[i]);
  }
  out << "\r\n";
}

std::vector<std::string> split_row(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw FormatError("unterminated quoted CSV field");
  fields.push_back(std::move(cur));
  return fields;
}

namespace {

template <typename Matrix, typename Fmt>
void write_any(std::ostream& out, const Matrix& m, Fmt fmt) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << fmt(m(i, j));
    }
    out << '\n';
  }
}

}  // namespace

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  write_any(out, m, [](double v) { return format_double(v); });
}

void write_matrix(std::ostream& out, const Eigen::MatrixXi& m) {
  write_any(out, m, [](int v) { return v; });
}

Eigen::MatrixXd read_matrix(std::istream& in, std::string* stop_line) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (stop_line) *stop_line = line;
      break;
    }
    std::vector<double> row;
    for (const auto& field : split_row(line)) {
      double v = 0.0;
      const char* first = field.data();
      const char* last = first + field.size();
      while (first < last && *first == ' ') ++first;
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last) throw FormatError("bad numeric CSV field '" + field + "'");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) throw FormatError("ragged CSV matrix");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return {};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace manie::csv
