#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace osclab {

/// Shortest text that round-trips: 17 significant digits, '.' decimal,
/// no locale. Non-finite values print as nan, inf, -inf.
std::string format_number(double v);

/// Quotes the field when it holds a comma, quote or line break.
std::string csv_escape(std::string_view s);

/// In-memory CSV table written with LF line endings.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  class Row {
   public:
    Row& operator<<(double v);
    Row& operator<<(long long v);
    Row& operator<<(unsigned long long v);
    Row& operator<<(int v) { return *this << static_cast<long long>(v); }
    Row& operator<<(std::size_t v) { return *this << static_cast<unsigned long long>(v); }
    Row& operator<<(bool v);
    Row& operator<<(std::string_view s);
    Row& operator<<(const char* s) { return *this << std::string_view(s); }
    Row& operator<<(const std::string& s) { return *this << std::string_view(s); }
    ~Row() noexcept(false);

   private:
    friend class CsvTable;
    explicit Row(CsvTable& table) : table_(table) {}
    CsvTable& table_;
    std::vector<std::string> cells_;
  };

  /// Cells are streamed in; the row is committed when the temporary
  /// dies. Throws if the cell count differs from the header.
  Row row() { return Row(*this); }

  std::size_t size() const { return rows_.size(); }
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  void write(std::ostream& out) const;
  void write(const std::string& path) const;
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace osclab
