#include "equinet/cross_section.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "equinet/csv.hpp"
#include "equinet/econometrics.hpp"
#include "equinet/error.hpp"

namespace equinet {

namespace {

constexpr std::array<std::string_view, 14> kFields = {
    "y",         "log_v",      "log_npp",     "npf_d",     "npf_d_sq",
    "mnvaltrd",  "degree",     "in_degree",   "out_degree", "betweenness",
    "clustering", "closeness", "eigenvector", "eccentricity",
};

double value_of(const FirmObservation& o, std::string_view name) {
  if (name == "y") return o.y;
  if (name == "log_v") return o.log_v;
  if (name == "log_npp") return o.log_npp;
  if (name == "npf_d") return o.npf_d;
  if (name == "npf_d_sq") return o.npf_d_sq;
  if (name == "mnvaltrd") return o.trading_amount;
  if (name == "degree") return o.degree;
  if (name == "in_degree") return o.in_degree;
  if (name == "out_degree") return o.out_degree;
  if (name == "betweenness") return o.betweenness;
  if (name == "clustering") return o.clustering_coefficient;
  if (name == "closeness") return o.closeness;
  if (name == "eigenvector") return o.eigenvector;
  if (name == "eccentricity") return o.eccentricity;
  throw Error(ErrorCode::UnknownField, fmt::format("unknown field '{}'", name));
}

}  // namespace

std::span<const std::string_view> observation_fields() { return kFields; }

std::vector<std::string> CrossSection::dummy_names() const {
  std::vector<std::string> out;
  for (int c : dummy_classes) out.push_back(fmt::format("class_{}", c));
  return out;
}

std::vector<double> CrossSection::field(std::string_view name) const {
  std::vector<double> out;
  out.reserve(rows.size());
  if (rows.empty()) {
    value_of(FirmObservation{}, name);  // still reject unknown names
    return out;
  }
  for (const auto& r : rows) out.push_back(value_of(r, name));
  return out;
}

CrossSection build_cross_section(const std::map<std::string, MarketAverage>& market,
                                 const std::map<std::string, FinancialRecord>& financials,
                                 std::span<const NodeMetrics> metrics,
                                 const CommunityPartition& partition, const PeriodWindow& window,
                                 const CrossSectionOptions& options) {
  CrossSection cs;
  cs.window = window.label;
  int missing_market = 0, missing_fin = 0, missing_class = 0, bad_v = 0, bad_npp = 0,
      non_finite = 0;

  for (const auto& m : metrics) {
    auto mk = market.find(m.firm_id);
    if (mk == market.end()) {
      ++missing_market;
      continue;
    }
    auto fin = financials.find(m.firm_id);
    if (fin == financials.end()) {
      ++missing_fin;
      continue;
    }
    const int cls = partition.class_of(m.firm_id);
    if (cls < 0) {
      ++missing_class;
      continue;
    }
    if (!(mk->second.market_value > 0.0)) {
      ++bad_v;
      continue;
    }
    if (!(fin->second.net_assets > 0.0)) {
      ++bad_npp;
      continue;
    }
    FirmObservation o;
    o.firm_id = m.firm_id;
    o.y = mk->second.monthly_return;
    o.log_v = std::log(mk->second.market_value);
    o.log_npp = std::log(fin->second.net_assets);
    o.net_profit = fin->second.net_profit;
    o.trading_amount = mk->second.trading_amount;
    o.in_degree = m.in_degree;
    o.out_degree = m.out_degree;
    o.degree = m.degree;
    o.betweenness = m.betweenness;
    o.clustering_coefficient = m.clustering_coefficient;
    o.closeness = m.closeness;
    o.eigenvector = m.eigenvector;
    o.eccentricity = m.eccentricity;
    o.class_index = cls;
    const std::array<double, 6> check{o.y, o.log_v, o.log_npp, o.net_profit, o.trading_amount,
                                      o.betweenness};
    if (!std::all_of(check.begin(), check.end(), [](double v) { return std::isfinite(v); })) {
      ++non_finite;
      continue;
    }
    cs.rows.push_back(std::move(o));
  }
  cs.dropped = {{"missing market data", missing_market},
                {"missing financials", missing_fin},
                {"missing class", missing_class},
                {"non-positive market value", bad_v},
                {"non-positive net assets", bad_npp},
                {"non-finite value", non_finite}};
  if (cs.rows.empty()) {
    throw Error(ErrorCode::EmptyJoin,
                fmt::format("no firm in window {} has market, financial, network and class data",
                            window.label));
  }

  std::vector<double> profit;
  for (const auto& r : cs.rows) profit.push_back(r.net_profit);
  const auto z = standardize(profit);
  double mean = 0.0;
  for (double p : profit) mean += p;
  mean /= static_cast<double>(profit.size());
  double ss = 0.0;
  for (double p : profit) ss += (p - mean) * (p - mean);
  cs.npf_mean = mean;
  cs.npf_sd = std::sqrt(ss / static_cast<double>(profit.size() - 1));
  for (std::size_t i = 0; i < cs.rows.size(); ++i) {
    cs.rows[i].npf_d = z[i];
    cs.rows[i].npf_d_sq = z[i] * z[i];
  }

  // Dummies: candidate classes, baseline = most populous in the sample.
  std::map<int, int> sample_counts;
  for (const auto& r : cs.rows) ++sample_counts[r.class_index];
  cs.baseline_class = sample_counts.begin()->first;
  for (const auto& [c, count] : sample_counts) {
    if (count > sample_counts[cs.baseline_class]) cs.baseline_class = c;
  }
  std::vector<int> candidates;
  if (options.dummies == DummyMode::AllClasses) {
    for (int c = 0; c < partition.class_count(); ++c) candidates.push_back(c);
  } else {
    candidates = significant_classes(partition, options.class_threshold);
  }
  for (int c : candidates) {
    if (c == cs.baseline_class) continue;
    if (sample_counts.contains(c)) {
      cs.dummy_classes.push_back(c);
    } else {
      cs.empty_classes.push_back(c);
    }
  }
  for (auto& r : cs.rows) {
    r.class_dummies.assign(cs.dummy_classes.size(), 0);
    for (std::size_t d = 0; d < cs.dummy_classes.size(); ++d) {
      if (r.class_index == cs.dummy_classes[d]) r.class_dummies[d] = 1;
    }
  }
  return cs;
}

void write_cross_section(std::ostream& out, const CrossSection& cs, char delimiter) {
  out << "firm_id";
  for (auto f : kFields) out << delimiter << f;
  out << delimiter << "class";
  for (const auto& d : cs.dummy_names()) out << delimiter << d;
  out << '\n';
  for (const auto& r : cs.rows) {
    out << csv::escape(r.firm_id, delimiter);
    for (auto f : kFields) out << delimiter << fmt::format("{}", value_of(r, f));
    out << delimiter << r.class_index;
    for (int d : r.class_dummies) out << delimiter << d;
    out << '\n';
  }
}

}  // namespace equinet
