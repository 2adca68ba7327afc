#include "osclab/csv.hpp"

#include "osclab/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace osclab {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable::Row& CsvTable::Row::operator<<(double v) {
  cells_.push_back(format_number(v));
  return *this;
}

CsvTable::Row& CsvTable::Row::operator<<(long long v) {
  cells_.push_back(std::to_string(v));
  return *this;
}

CsvTable::Row& CsvTable::Row::operator<<(unsigned long long v) {
  cells_.push_back(std::to_string(v));
  return *this;
}

CsvTable::Row& CsvTable::Row::operator<<(bool v) {
  cells_.emplace_back(v ? "true" : "false");
  return *this;
}

CsvTable::Row& CsvTable::Row::operator<<(std::string_view s) {
  cells_.push_back(csv_escape(s));
  return *this;
}

CsvTable::Row::~Row() noexcept(false) {
  if (std::uncaught_exceptions() > 0) return;
  if (cells_.size() != table_.header_.size())
    throw ParameterError("csv row has " + std::to_string(cells_.size()) + " cells, header has " +
                         std::to_string(table_.header_.size()));
  table_.rows_.push_back(std::move(cells_));
}

void CsvTable::write(std::ostream& out) const {
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  std::vector<std::string> head;
  for (const auto& h : header_) head.push_back(csv_escape(h));
  line(head);
  for (const auto& r : rows_) line(r);
}

void CsvTable::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  write(out);
  if (!out) throw Error("write failed: " + path);
}

std::string CsvTable::str() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

}  // namespace osclab
