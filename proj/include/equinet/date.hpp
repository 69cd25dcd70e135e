#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace equinet {

using Date = std::chrono::year_month_day;

/// Parses an ISO-8601 calendar date (YYYY-MM-DD). Throws
/// Error(UnparsableValue) on malformed or impossible dates.
Date parse_date(std::string_view text);
std::string format_date(const Date& date);

/// A calendar month, written YYYY-MM.
struct YearMonth {
  int year = 0;
  unsigned month = 1;

  Date first_day() const;
  Date last_day() const;
  auto operator<=>(const YearMonth&) const = default;
};

YearMonth parse_year_month(std::string_view text);
std::string format_year_month(const YearMonth& ym);

/// A fiscal quarter, written YYYY-Qn.
struct YearQuarter {
  int year = 0;
  unsigned quarter = 1;

  Date first_day() const;
  Date last_day() const;
  auto operator<=>(const YearQuarter&) const = default;
};

YearQuarter parse_year_quarter(std::string_view text);
std::string format_year_quarter(const YearQuarter& yq);

}  // namespace equinet
