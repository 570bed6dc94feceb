#pragma once

// RFC-4180 CSV with CRLF records and doubles at 12 significant digits.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vlab/core.hpp"

namespace vlab {

using CsvCell = std::variant<std::string, double, std::size_t, long long>;

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<CsvCell> row) {
    detail::require(row.size() == header_.size(), "CSV row width does not match header");
    rows_.push_back(std::move(row));
  }

  std::size_t rows() const noexcept { return rows_.size(); }

  std::string str() const {
    std::ostringstream out;
    write_record(out, header_);
    for (const auto& row : rows_) {
      std::vector<std::string> cells;
      cells.reserve(row.size());
      for (const auto& cell : row) {
        cells.push_back(std::visit(
            [](const auto& v) -> std::string {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, std::string>) return v;
              else if constexpr (std::is_same_v<T, double>) return format_double(v);
              else return std::to_string(v);
            },
            cell));
      }
      write_record(out, cells);
    }
    return out.str();
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    detail::require(out.good(), "cannot write " + path);
    out << str();
  }

 private:
  static void write_record(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << csv_escape(cells[i]);
    }
    out << "\r\n";
  }

  std::vector<std::string> header_;
  std::vector<std::vector<CsvCell>> rows_;
};

}  // namespace vlab
