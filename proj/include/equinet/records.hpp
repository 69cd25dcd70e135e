#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "equinet/date.hpp"

namespace equinet {

/// Inclusive calendar window. Windows in one run must be sorted by start
/// and pairwise disjoint (see validate_windows).
struct PeriodWindow {
  std::string label;
  Date start;
  Date end;

  bool contains(const Date& d) const { return start <= d && d <= end; }
  bool spans_whole_months() const;
};

/// Parses `label:YYYY-MM-DD:YYYY-MM-DD`.
PeriodWindow parse_window_spec(std::string_view spec);

/// Throws Error(InvalidWindow) for start > end, unsorted windows, or
/// overlaps; the message names both windows of an overlapping pair.
void validate_windows(std::span<const PeriodWindow> windows);

struct ShareholderRecord {
  std::string firm_id;
  std::string shareholder_name;
  int rank = 0;
  Date report_date;

  bool operator==(const ShareholderRecord&) const = default;
};

struct LegalRepRecord {
  std::string person_name;
  std::string firm_id;
  Date report_date;

  bool operator==(const LegalRepRecord&) const = default;
};

struct MarketRecord {
  std::string firm_id;
  YearMonth month;
  double monthly_return = 0.0;
  double market_value = 0.0;
  double trading_amount = 0.0;

  bool operator==(const MarketRecord&) const = default;
};

struct FinancialRecord {
  std::string firm_id;
  YearQuarter quarter;
  double net_assets = 0.0;
  double net_profit = 0.0;

  bool operator==(const FinancialRecord&) const = default;
};

/// Maps a registry name (as it appears in shareholder lists) to the
/// ticker of a listed firm. Drives Type 1 edge resolution.
struct FirmAlias {
  std::string name;
  std::string firm_id;

  bool operator==(const FirmAlias&) const = default;
};

/// Trims and collapses runs of whitespace (ASCII, NBSP, ideographic space)
/// to a single ASCII space.
std::string normalize_name(std::string_view raw);

struct ParseOptions {
  char delimiter = ',';
  bool skip_bad_rows = false;
};

struct SkippedRow {
  std::size_t line = 0;
  std::string reason;
};

template <typename Record>
struct ParseResult {
  std::vector<Record> records;
  std::vector<SkippedRow> skipped;
};

/// Reads a header-first delimited file of one record kind. Columns are
/// located by header name; extra columns are ignored. Bad rows abort with
/// ParseError unless options.skip_bad_rows is set, in which case they are
/// listed in `skipped`. A missing column always aborts.
template <typename Record>
ParseResult<Record> parse_records(const std::filesystem::path& path,
                                  const ParseOptions& options = {});

template <typename Record>
ParseResult<Record> parse_records(std::istream& in, const std::string& source,
                                  const ParseOptions& options = {});

template <typename Record>
void write_records(std::ostream& out, std::span<const Record> records, char delimiter = ',');

/// The date a record is filed under for window slicing: report date for
/// filings, last day of the month or quarter for periodic data.
inline Date record_date(const ShareholderRecord& r) { return r.report_date; }
inline Date record_date(const LegalRepRecord& r) { return r.report_date; }
inline Date record_date(const MarketRecord& r) { return r.month.last_day(); }
inline Date record_date(const FinancialRecord& r) { return r.quarter.last_day(); }

template <typename Record, typename DateOf>
std::vector<Record> window_slice(std::span<const Record> records, const PeriodWindow& window,
                                 DateOf date_of) {
  std::vector<Record> out;
  for (const auto& r : records) {
    if (window.contains(date_of(r))) out.push_back(r);
  }
  return out;
}

template <typename Record>
std::vector<Record> window_slice(std::span<const Record> records, const PeriodWindow& window) {
  return window_slice(records, window, [](const Record& r) { return record_date(r); });
}

struct MarketAverage {
  double monthly_return = 0.0;
  double market_value = 0.0;
  double trading_amount = 0.0;
  int months = 0;
};

/// Per-firm arithmetic means over the months inside `window`. Sums run in
/// month order, so the result does not depend on record order. Throws
/// Error(InvalidWindow) if the window does not span whole months.
std::map<std::string, MarketAverage> quarterly_average(std::span<const MarketRecord> market,
                                                       const PeriodWindow& window);

/// The financial filing attributed to a window: the quarter whose last day
/// falls inside it (the latest such quarter if several do).
std::map<std::string, FinancialRecord> financials_for_window(
    std::span<const FinancialRecord> financials, const PeriodWindow& window);

}  // namespace equinet
