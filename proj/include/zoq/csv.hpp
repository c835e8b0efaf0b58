#ifndef ZOQ_CSV_HPP
#define ZOQ_CSV_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace zoq {

/// Minimal CSV emitter. Doubles use a fixed "%.12g" rendering so output bytes
/// depend only on the values.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(const std::vector<std::string>& names);
  CsvWriter& field(double value);
  CsvWriter& field(std::int64_t value);
  CsvWriter& field(int value) { return field(static_cast<std::int64_t>(value)); }
  CsvWriter& field(const std::string& value);
  CsvWriter& field(const char* value) { return field(std::string(value)); }
  CsvWriter& field(bool value) { return field(std::string(value ? "true" : "false")); }
  void end_row();

 private:
  void separator();

  std::ostream& out_;
  bool row_open_ = false;
};

std::string format_number(double value);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  /// Throws Errc::invalid_argument when the column is absent.
  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);

}  // namespace zoq

#endif  // ZOQ_CSV_HPP
