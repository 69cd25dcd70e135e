#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace equinet::csv {

/// Splits one delimited line. Fields may be double-quoted; a doubled quote
/// inside a quoted field is a literal quote. Returns false on an
/// unterminated quote.
bool split_line(std::string_view line, char delimiter, std::vector<std::string>& out);

/// Quotes a field only when it contains the delimiter, a quote, or a line
/// break.
std::string escape(std::string_view field, char delimiter);

std::string join(const std::vector<std::string>& fields, char delimiter);

/// Header-first table reader that tracks 1-based line numbers.
class Reader {
 public:
  Reader(std::istream& in, char delimiter);

  const std::vector<std::string>& header() const { return header_; }
  bool has_header() const { return has_header_; }

  /// Index of a header column, or -1.
  int column(std::string_view name) const;

  /// Reads the next non-blank row; false at end of input. Sets `ok` to
  /// false when the row's quoting is malformed.
  bool next(std::vector<std::string>& fields, bool& ok);

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  char delimiter_;
  std::vector<std::string> header_;
  bool has_header_ = false;
  std::size_t line_ = 0;
};

}  // namespace equinet::csv
