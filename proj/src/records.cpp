#include "equinet/records.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "equinet/csv.hpp"
#include "equinet/error.hpp"

namespace equinet {

namespace {

// Row-level failure; converted to ParseError (or a skip) by the reader loop.
struct RowFailure {
  ErrorCode code;
  std::string detail;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(std::string_view field, std::string_view column) {
  const std::string t = trim(field);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(value)) {
    throw RowFailure{ErrorCode::UnparsableValue,
                     fmt::format("column '{}': not a number: '{}'", column, field)};
  }
  return value;
}

int parse_int(std::string_view field, std::string_view column) {
  const std::string t = trim(field);
  int value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw RowFailure{ErrorCode::UnparsableValue,
                     fmt::format("column '{}': not an integer: '{}'", column, field)};
  }
  return value;
}

template <typename F>
auto guard_value(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw RowFailure{ErrorCode::UnparsableValue, e.what()};
  }
}

std::string require_id(std::string_view field, std::string_view column) {
  std::string id = trim(field);
  if (id.empty()) {
    throw RowFailure{ErrorCode::RowInvariantViolation, fmt::format("column '{}' is empty", column)};
  }
  return id;
}

std::string require_name(std::string_view field, std::string_view column) {
  std::string name = normalize_name(field);
  if (name.empty()) {
    throw RowFailure{ErrorCode::RowInvariantViolation,
                     fmt::format("column '{}' is empty after normalization", column)};
  }
  return name;
}

// Per-kind schema: column names, row decoding, row encoding, and the
// uniqueness checks that span rows.
template <typename Record>
struct Schema;

template <>
struct Schema<ShareholderRecord> {
  static constexpr std::array<std::string_view, 4> columns{"firm_id", "shareholder_name", "rank",
                                                          "report_date"};
  static ShareholderRecord decode(const std::vector<std::string_view>& f) {
    ShareholderRecord r;
    r.firm_id = require_id(f[0], columns[0]);
    r.shareholder_name = require_name(f[1], columns[1]);
    r.rank = parse_int(f[2], columns[2]);
    r.report_date = guard_value([&] { return parse_date(trim(f[3])); });
    if (r.rank < 1 || r.rank > 10) {
      throw RowFailure{ErrorCode::RowInvariantViolation,
                       fmt::format("rank {} outside 1..10", r.rank)};
    }
    return r;
  }
  static std::vector<std::string> encode(const ShareholderRecord& r) {
    return {r.firm_id, r.shareholder_name, std::to_string(r.rank), format_date(r.report_date)};
  }

  struct Checker {
    std::map<std::pair<std::string, Date>, std::set<int>> ranks;
    void check(const ShareholderRecord& r) {
      auto& seen = ranks[{r.firm_id, r.report_date}];
      if (seen.count(r.rank)) {
        throw RowFailure{ErrorCode::RowInvariantViolation,
                         fmt::format("duplicate rank {} for {} on {}", r.rank, r.firm_id,
                                     format_date(r.report_date))};
      }
      // Distinct ranks in 1..10 already cap the filing at ten rows.
      seen.insert(r.rank);
    }
  };
};

template <>
struct Schema<LegalRepRecord> {
  static constexpr std::array<std::string_view, 3> columns{"person_name", "firm_id",
                                                          "report_date"};
  static LegalRepRecord decode(const std::vector<std::string_view>& f) {
    LegalRepRecord r;
    r.person_name = require_name(f[0], columns[0]);
    r.firm_id = require_id(f[1], columns[1]);
    r.report_date = guard_value([&] { return parse_date(trim(f[2])); });
    return r;
  }
  static std::vector<std::string> encode(const LegalRepRecord& r) {
    return {r.person_name, r.firm_id, format_date(r.report_date)};
  }

  struct Checker {
    std::set<std::pair<std::string, Date>> seen;
    void check(const LegalRepRecord& r) {
      if (!seen.insert({r.firm_id, r.report_date}).second) {
        throw RowFailure{ErrorCode::RowInvariantViolation,
                         fmt::format("second legal representative for {} on {}", r.firm_id,
                                     format_date(r.report_date))};
      }
    }
  };
};

template <>
struct Schema<MarketRecord> {
  static constexpr std::array<std::string_view, 5> columns{
      "firm_id", "month", "monthly_return", "market_value", "trading_amount"};
  static MarketRecord decode(const std::vector<std::string_view>& f) {
    MarketRecord r;
    r.firm_id = require_id(f[0], columns[0]);
    r.month = guard_value([&] { return parse_year_month(trim(f[1])); });
    r.monthly_return = parse_double(f[2], columns[2]);
    r.market_value = parse_double(f[3], columns[3]);
    r.trading_amount = parse_double(f[4], columns[4]);
    if (!(r.market_value > 0.0)) {
      throw RowFailure{ErrorCode::RowInvariantViolation, "market_value must be > 0"};
    }
    if (!(r.trading_amount >= 0.0)) {
      throw RowFailure{ErrorCode::RowInvariantViolation, "trading_amount must be >= 0"};
    }
    if (!(r.monthly_return > -1.0)) {
      throw RowFailure{ErrorCode::RowInvariantViolation, "monthly_return must be > -1"};
    }
    return r;
  }
  static std::vector<std::string> encode(const MarketRecord& r) {
    return {r.firm_id, format_year_month(r.month), fmt::format("{}", r.monthly_return),
            fmt::format("{}", r.market_value), fmt::format("{}", r.trading_amount)};
  }

  struct Checker {
    std::set<std::pair<std::string, YearMonth>> seen;
    void check(const MarketRecord& r) {
      if (!seen.insert({r.firm_id, r.month}).second) {
        throw RowFailure{ErrorCode::RowInvariantViolation,
                         fmt::format("second record for {} in {}", r.firm_id,
                                     format_year_month(r.month))};
      }
    }
  };
};

template <>
struct Schema<FinancialRecord> {
  static constexpr std::array<std::string_view, 4> columns{"firm_id", "quarter", "net_assets",
                                                          "net_profit"};
  static FinancialRecord decode(const std::vector<std::string_view>& f) {
    FinancialRecord r;
    r.firm_id = require_id(f[0], columns[0]);
    r.quarter = guard_value([&] { return parse_year_quarter(trim(f[1])); });
    r.net_assets = parse_double(f[2], columns[2]);
    r.net_profit = parse_double(f[3], columns[3]);
    return r;
  }
  static std::vector<std::string> encode(const FinancialRecord& r) {
    return {r.firm_id, format_year_quarter(r.quarter), fmt::format("{}", r.net_assets),
            fmt::format("{}", r.net_profit)};
  }

  struct Checker {
    std::set<std::pair<std::string, YearQuarter>> seen;
    void check(const FinancialRecord& r) {
      if (!seen.insert({r.firm_id, r.quarter}).second) {
        throw RowFailure{ErrorCode::RowInvariantViolation,
                         fmt::format("second record for {} in {}", r.firm_id,
                                     format_year_quarter(r.quarter))};
      }
    }
  };
};

template <>
struct Schema<FirmAlias> {
  static constexpr std::array<std::string_view, 2> columns{"name", "firm_id"};
  static FirmAlias decode(const std::vector<std::string_view>& f) {
    return FirmAlias{require_name(f[0], columns[0]), require_id(f[1], columns[1])};
  }
  static std::vector<std::string> encode(const FirmAlias& r) { return {r.name, r.firm_id}; }

  struct Checker {
    std::map<std::string, std::string> seen;
    void check(const FirmAlias& r) {
      auto [it, inserted] = seen.emplace(r.name, r.firm_id);
      if (!inserted && it->second != r.firm_id) {
        throw RowFailure{ErrorCode::RowInvariantViolation,
                         fmt::format("alias '{}' maps to both {} and {}", r.name, it->second,
                                     r.firm_id)};
      }
    }
  };
};

bool is_space_at(std::string_view s, std::size_t i, std::size_t& width) {
  const auto c = static_cast<unsigned char>(s[i]);
  if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
    width = 1;
    return true;
  }
  if (c == 0xC2 && i + 1 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0xA0) {
    width = 2;
    return true;
  }
  if (c == 0xE3 && i + 2 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0x80 &&
      static_cast<unsigned char>(s[i + 2]) == 0x80) {
    width = 3;
    return true;
  }
  return false;
}

}  // namespace

std::string normalize_name(std::string_view raw) {
  std::string out;
  bool pending_space = false;
  for (std::size_t i = 0; i < raw.size();) {
    std::size_t width = 0;
    if (is_space_at(raw, i, width)) {
      pending_space = !out.empty();
      i += width;
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(raw[i]);
    ++i;
  }
  return out;
}

bool PeriodWindow::spans_whole_months() const {
  const Date month_end{std::chrono::year_month_day_last{end.year(),
                                                       std::chrono::month_day_last{end.month()}}};
  return start.day() == std::chrono::day{1} && end == month_end;
}

PeriodWindow parse_window_spec(std::string_view spec) {
  const auto first = spec.find(':');
  const auto second = first == std::string_view::npos ? first : spec.find(':', first + 1);
  if (second == std::string_view::npos || spec.find(':', second + 1) != std::string_view::npos) {
    throw Error(ErrorCode::InvalidWindow,
                fmt::format("expected label:YYYY-MM-DD:YYYY-MM-DD, got '{}'", spec));
  }
  PeriodWindow w;
  w.label = trim(spec.substr(0, first));
  if (w.label.empty()) throw Error(ErrorCode::InvalidWindow, "window label is empty");
  try {
    w.start = parse_date(trim(spec.substr(first + 1, second - first - 1)));
    w.end = parse_date(trim(spec.substr(second + 1)));
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidWindow, fmt::format("window '{}': {}", w.label, e.what()));
  }
  if (w.end < w.start) {
    throw Error(ErrorCode::InvalidWindow, fmt::format("window '{}' ends before it starts", w.label));
  }
  return w;
}

void validate_windows(std::span<const PeriodWindow> windows) {
  std::set<std::string> labels;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto& w = windows[i];
    if (w.end < w.start) {
      throw Error(ErrorCode::InvalidWindow, fmt::format("window '{}' ends before it starts", w.label));
    }
    if (!labels.insert(w.label).second) {
      throw Error(ErrorCode::InvalidWindow, fmt::format("duplicate window label '{}'", w.label));
    }
    for (std::size_t j = 0; j < i; ++j) {
      const auto& v = windows[j];
      if (v.start <= w.end && w.start <= v.end) {
        throw Error(ErrorCode::InvalidWindow,
                    fmt::format("windows '{}' and '{}' overlap", v.label, w.label));
      }
    }
    if (i > 0 && w.start < windows[i - 1].start) {
      throw Error(ErrorCode::InvalidWindow,
                  fmt::format("window '{}' starts before '{}'; windows must be sorted", w.label,
                              windows[i - 1].label));
    }
  }
}

template <typename Record>
ParseResult<Record> parse_records(std::istream& in, const std::string& source,
                                  const ParseOptions& options) {
  using S = Schema<Record>;
  csv::Reader reader(in, options.delimiter);
  if (!reader.has_header()) {
    throw ParseError(ErrorCode::MissingColumn, source, 1, "no header row");
  }
  std::array<int, S::columns.size()> index{};
  for (std::size_t c = 0; c < S::columns.size(); ++c) {
    index[c] = reader.column(S::columns[c]);
    if (index[c] < 0) {
      throw ParseError(ErrorCode::MissingColumn, source, 1,
                       fmt::format("header lacks column '{}'", S::columns[c]));
    }
  }

  ParseResult<Record> result;
  typename S::Checker checker;
  std::vector<std::string> fields;
  std::vector<std::string_view> picked(S::columns.size());
  bool ok = true;
  while (reader.next(fields, ok)) {
    try {
      if (!ok) throw RowFailure{ErrorCode::UnparsableValue, "unterminated quote"};
      for (std::size_t c = 0; c < S::columns.size(); ++c) {
        if (static_cast<std::size_t>(index[c]) >= fields.size()) {
          throw RowFailure{ErrorCode::UnparsableValue,
                           fmt::format("row has {} fields, column '{}' missing", fields.size(),
                                       S::columns[c])};
        }
        picked[c] = fields[index[c]];
      }
      Record r = S::decode(picked);
      checker.check(r);
      result.records.push_back(std::move(r));
    } catch (const RowFailure& failure) {
      if (!options.skip_bad_rows) {
        throw ParseError(failure.code, source, reader.line(), failure.detail);
      }
      result.skipped.push_back({reader.line(), failure.detail});
    }
  }
  return result;
}

template <typename Record>
ParseResult<Record> parse_records(const std::filesystem::path& path, const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  return parse_records<Record>(in, path.string(), options);
}

template <typename Record>
void write_records(std::ostream& out, std::span<const Record> records, char delimiter) {
  using S = Schema<Record>;
  std::vector<std::string> header(S::columns.begin(), S::columns.end());
  out << csv::join(header, delimiter) << '\n';
  for (const auto& r : records) out << csv::join(S::encode(r), delimiter) << '\n';
}

#define EQUINET_INSTANTIATE(T)                                                              \
  template ParseResult<T> parse_records<T>(std::istream&, const std::string&,               \
                                           const ParseOptions&);                            \
  template ParseResult<T> parse_records<T>(const std::filesystem::path&, const ParseOptions&); \
  template void write_records<T>(std::ostream&, std::span<const T>, char);

EQUINET_INSTANTIATE(ShareholderRecord)
EQUINET_INSTANTIATE(LegalRepRecord)
EQUINET_INSTANTIATE(MarketRecord)
EQUINET_INSTANTIATE(FinancialRecord)
EQUINET_INSTANTIATE(FirmAlias)
#undef EQUINET_INSTANTIATE

std::map<std::string, MarketAverage> quarterly_average(std::span<const MarketRecord> market,
                                                       const PeriodWindow& window) {
  if (!window.spans_whole_months()) {
    throw Error(ErrorCode::InvalidWindow,
                fmt::format("window '{}' does not span whole months", window.label));
  }
  std::map<std::string, std::vector<const MarketRecord*>> by_firm;
  for (const auto& r : market) {
    if (window.contains(r.month.first_day()) && window.contains(r.month.last_day())) {
      by_firm[r.firm_id].push_back(&r);
    }
  }
  std::map<std::string, MarketAverage> out;
  for (auto& [firm, rows] : by_firm) {
    std::sort(rows.begin(), rows.end(),
              [](const MarketRecord* a, const MarketRecord* b) { return a->month < b->month; });
    MarketAverage avg;
    for (const auto* r : rows) {
      avg.monthly_return += r->monthly_return;
      avg.market_value += r->market_value;
      avg.trading_amount += r->trading_amount;
    }
    avg.months = static_cast<int>(rows.size());
    avg.monthly_return /= avg.months;
    avg.market_value /= avg.months;
    avg.trading_amount /= avg.months;
    out.emplace(firm, avg);
  }
  return out;
}

std::map<std::string, FinancialRecord> financials_for_window(
    std::span<const FinancialRecord> financials, const PeriodWindow& window) {
  std::map<std::string, FinancialRecord> out;
  for (const auto& r : financials) {
    if (!window.contains(r.quarter.last_day())) continue;
    auto it = out.find(r.firm_id);
    if (it == out.end()) {
      out.emplace(r.firm_id, r);
    } else if (it->second.quarter < r.quarter) {
      it->second = r;
    }
  }
  return out;
}

}  // namespace equinet
