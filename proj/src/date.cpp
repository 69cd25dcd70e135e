#include "equinet/date.hpp"

#include <charconv>

#include <fmt/format.h>

#include "equinet/error.hpp"

namespace equinet {

namespace {

using namespace std::chrono;

int parse_int(std::string_view text, std::string_view whole) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::UnparsableValue, fmt::format("bad date component in '{}'", whole));
  }
  return value;
}

bool all_digits(std::string_view s) {
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return !s.empty();
}

}  // namespace

Date parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
      !all_digits(text.substr(0, 4)) || !all_digits(text.substr(5, 2)) ||
      !all_digits(text.substr(8, 2))) {
    throw Error(ErrorCode::UnparsableValue,
                fmt::format("expected YYYY-MM-DD, got '{}'", text));
  }
  Date d{year{parse_int(text.substr(0, 4), text)},
         month{static_cast<unsigned>(parse_int(text.substr(5, 2), text))},
         day{static_cast<unsigned>(parse_int(text.substr(8, 2), text))}};
  if (!d.ok()) {
    throw Error(ErrorCode::UnparsableValue, fmt::format("no such date '{}'", text));
  }
  return d;
}

std::string format_date(const Date& d) {
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(d.year()),
                     static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
}

Date YearMonth::first_day() const {
  return Date{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{1}};
}

Date YearMonth::last_day() const {
  return Date{std::chrono::year_month_day_last{
      std::chrono::year{year}, std::chrono::month_day_last{std::chrono::month{month}}}};
}

YearMonth parse_year_month(std::string_view text) {
  if (text.size() != 7 || text[4] != '-' || !all_digits(text.substr(0, 4)) ||
      !all_digits(text.substr(5, 2))) {
    throw Error(ErrorCode::UnparsableValue, fmt::format("expected YYYY-MM, got '{}'", text));
  }
  YearMonth ym{parse_int(text.substr(0, 4), text),
               static_cast<unsigned>(parse_int(text.substr(5, 2), text))};
  if (ym.month < 1 || ym.month > 12) {
    throw Error(ErrorCode::UnparsableValue, fmt::format("no such month '{}'", text));
  }
  return ym;
}

std::string format_year_month(const YearMonth& ym) {
  return fmt::format("{:04d}-{:02d}", ym.year, ym.month);
}

Date YearQuarter::first_day() const {
  return YearMonth{year, 3 * quarter - 2}.first_day();
}

Date YearQuarter::last_day() const { return YearMonth{year, 3 * quarter}.last_day(); }

YearQuarter parse_year_quarter(std::string_view text) {
  if (text.size() != 7 || text[4] != '-' || (text[5] != 'Q' && text[5] != 'q') ||
      !all_digits(text.substr(0, 4)) || text[6] < '1' || text[6] > '4') {
    throw Error(ErrorCode::UnparsableValue, fmt::format("expected YYYY-Qn, got '{}'", text));
  }
  return YearQuarter{parse_int(text.substr(0, 4), text),
                     static_cast<unsigned>(text[6] - '0')};
}

std::string format_year_quarter(const YearQuarter& yq) {
  return fmt::format("{:04d}-Q{}", yq.year, yq.quarter);
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::RowInvariantViolation: return "RowInvariantViolation";
    case ErrorCode::UnparsableValue: return "UnparsableValue";
    case ErrorCode::InvalidWindow: return "InvalidWindow";
    case ErrorCode::EdgeEndpointUnknown: return "EdgeEndpointUnknown";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InvalidAssignment: return "InvalidAssignment";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::NonFiniteForce: return "NonFiniteForce";
    case ErrorCode::MissingPosition: return "MissingPosition";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::EmptyJoin: return "EmptyJoin";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::OrderCondition: return "OrderCondition";
    case ErrorCode::ZeroQuadratic: return "ZeroQuadratic";
    case ErrorCode::UnknownField: return "UnknownField";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::StageFailed: return "StageFailed";
  }
  return "Unknown";
}

}  // namespace equinet
