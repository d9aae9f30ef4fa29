#include "modsim/csv.hpp"

#include <algorithm>
#include <charconv>

#include "modsim/errors.hpp"

namespace modsim::csv {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  while (true) {
    const auto pos = line.find(sep, begin);
    out.emplace_back(trim(line.substr(begin, pos - begin)));
    if (pos == std::string_view::npos) break;
    begin = pos + 1;
  }
  return out;
}

Reader::Reader(std::istream& in, std::string source_name)
    : in_(in), source_(std::move(source_name)) {
  std::string raw;
  while (std::getline(in_, raw)) {
    ++line_;
    if (!trim(raw).empty()) {
      header_ = split(raw);
      return;
    }
  }
  throw LoadError(source_ + ": missing header line");
}

void Reader::require_columns(
    std::initializer_list<std::string_view> names) const {
  for (auto name : names) {
    if (!has_column(name)) {
      throw LoadError(source_ + ": missing column '" + std::string(name) +
                      "'");
    }
  }
}

bool Reader::has_column(std::string_view name) const {
  return std::find(header_.begin(), header_.end(), name) != header_.end();
}

bool Reader::next() {
  std::string raw;
  while (std::getline(in_, raw)) {
    ++line_;
    if (trim(raw).empty()) continue;
    fields_ = split(raw);
    return true;
  }
  return false;
}

std::size_t Reader::column_index(std::string_view column) const {
  const auto it = std::find(header_.begin(), header_.end(), column);
  if (it == header_.end()) {
    throw LoadError(source_ + ": missing column '" + std::string(column) + "'");
  }
  return static_cast<std::size_t>(it - header_.begin());
}

std::string_view Reader::field(std::string_view column) const {
  const auto idx = column_index(column);
  if (idx >= fields_.size()) return {};
  return fields_[idx];
}

long long Reader::as_int(std::string_view column) const {
  const auto text = field(column);
  long long value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw LoadError(where() + ": column '" + std::string(column) +
                    "' is not an integer: '" + std::string(text) + "'");
  }
  return value;
}

double Reader::as_double(std::string_view column) const {
  const auto value = as_optional_double(column);
  if (!value) {
    throw LoadError(where() + ": column '" + std::string(column) +
                    "' is empty");
  }
  return *value;
}

std::optional<double> Reader::as_optional_double(
    std::string_view column) const {
  const auto text = field(column);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw LoadError(where() + ": column '" + std::string(column) +
                    "' is not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::string Reader::where() const {
  return source_ + ":" + std::to_string(line_);
}

}  // namespace modsim::csv
