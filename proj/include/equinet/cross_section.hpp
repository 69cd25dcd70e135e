#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "equinet/community.hpp"
#include "equinet/metrics.hpp"
#include "equinet/records.hpp"

namespace equinet {

struct FirmObservation {
  std::string firm_id;
  double y = 0.0;
  double log_v = 0.0;
  double log_npp = 0.0;
  double net_profit = 0.0;
  double npf_d = 0.0;
  double npf_d_sq = 0.0;
  /// Average monthly trading amount ("mnvaltrd").
  double trading_amount = 0.0;
  int in_degree = 0;
  int out_degree = 0;
  int degree = 0;
  double betweenness = 0.0;
  double clustering_coefficient = 0.0;
  double closeness = 0.0;
  double eigenvector = 0.0;
  int eccentricity = 0;
  int class_index = -1;
  std::vector<int> class_dummies;
};

enum class DummyMode { AllClasses, SignificantClasses };

struct CrossSectionOptions {
  DummyMode dummies = DummyMode::AllClasses;
  double class_threshold = 0.05;
};

struct CrossSection {
  std::string window;
  std::vector<FirmObservation> rows;
  /// Drop reason and count, in a fixed order; zero counts included.
  std::vector<std::pair<std::string, int>> dropped;
  /// Omitted class; the class with the most sample firms.
  int baseline_class = -1;
  /// Class behind each dummy column.
  std::vector<int> dummy_classes;
  /// Candidate dummy classes with no firm in the sample.
  std::vector<int> empty_classes;
  double npf_mean = 0.0;
  double npf_sd = 0.0;

  std::vector<std::string> dummy_names() const;
  /// Column of a named field over all rows. Throws UnknownField.
  std::vector<double> field(std::string_view name) const;
};

/// Field names accepted by CrossSection::field and model specs.
std::span<const std::string_view> observation_fields();

/// Inner join of market averages, the window's financial filing, node
/// metrics and the partition, keyed by firm. Firms with a missing source
/// or a non-positive log input are dropped and counted. Net profit is
/// z-scored on the surviving sample. Throws EmptyJoin.
CrossSection build_cross_section(const std::map<std::string, MarketAverage>& market,
                                 const std::map<std::string, FinancialRecord>& financials,
                                 std::span<const NodeMetrics> metrics,
                                 const CommunityPartition& partition, const PeriodWindow& window,
                                 const CrossSectionOptions& options = {});

/// One row per observation with every field and dummy, for auditing.
void write_cross_section(std::ostream& out, const CrossSection& cs, char delimiter = ',');

}  // namespace equinet
