#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace modsim::csv {

/// Minimal header-driven reader for the comma separated files used by the
/// toolkit. No quoting: fields never contain commas.
class Reader {
 public:
  /// Reads the header line. `source_name` is used in error messages.
  Reader(std::istream& in, std::string source_name);

  /// Requires the header to contain every column in `names`.
  void require_columns(std::initializer_list<std::string_view> names) const;

  bool has_column(std::string_view name) const;

  /// Advances to the next non-blank row. Returns false at end of input.
  bool next();

  /// Raw (trimmed) field; empty string when the row is short.
  std::string_view field(std::string_view column) const;

  long long as_int(std::string_view column) const;
  double as_double(std::string_view column) const;
  std::optional<double> as_optional_double(std::string_view column) const;

  /// 1-based line number of the current row.
  std::size_t line() const noexcept { return line_; }
  const std::string& source() const noexcept { return source_; }

  /// "<source>:<line>" for error messages.
  std::string where() const;

 private:
  std::size_t column_index(std::string_view column) const;

  std::istream& in_;
  std::string source_;
  std::vector<std::string> header_;
  std::vector<std::string> fields_;
  std::size_t line_ = 0;
};

std::vector<std::string> split(std::string_view line, char sep = ',');

}  // namespace modsim::csv
