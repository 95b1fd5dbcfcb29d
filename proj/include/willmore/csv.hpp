#ifndef WILLMORE_CSV_HPP
#define WILLMORE_CSV_HPP

#include <cstdio>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "willmore/errors.hpp"

namespace willmore {

/// Decimal with 12 significant digits; the same value always prints the same bytes.
inline std::string format_number(double x) {
  if (x == 0.0) x = 0.0;  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

/// Column-oriented table with a mandatory header row.
class CsvTable {
 public:
  using Cell = std::variant<double, long long, std::string>;

  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<Cell> row) {
    if (row.size() != header_.size()) throw std::logic_error("csv row width does not match header");
    rows_.push_back(std::move(row));
  }

  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& header() const { return header_; }

  std::string str() const {
    std::string out;
    append_line(out, header_);
    for (const auto& r : rows_) {
      std::vector<std::string> cells;
      for (const Cell& c : r) {
        if (const double* d = std::get_if<double>(&c)) cells.push_back(format_number(*d));
        else if (const long long* i = std::get_if<long long>(&c)) cells.push_back(std::to_string(*i));
        else cells.push_back(std::get<std::string>(c));
      }
      append_line(out, cells);
    }
    return out;
  }

  void write(const std::string& path) const { write_text(path, str()); }

  static void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot write " + path);
    f << text;
    if (!f) throw ValidationError("cannot write " + path);
  }

 private:
  static void append_line(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out += ',';
      out += cells[k];
    }
    out += '\n';
  }

  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

}  // namespace willmore

#endif  // WILLMORE_CSV_HPP
