#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "equinet/linalg.hpp"

namespace equinet {

enum class SeType { Classical, HC0, HC1 };

std::string_view to_string(SeType se);
SeType parse_se_type(std::string_view text);

enum class Estimator { OLS, WLS, TSLS };

struct FirstStage {
  std::string endogenous;
  double r_squared = 0.0;
  /// F test of the excluded instruments in the first stage.
  double partial_f = 0.0;
  int df1 = 0;
  int df2 = 0;
};

struct ModelResult {
  Estimator estimator = Estimator::OLS;
  SeType se_type = SeType::HC1;
  std::vector<std::string> names;
  Vector coefficients;
  Vector standard_errors;
  Vector t_stats;
  Vector p_values;
  Matrix covariance;
  double r_squared = 0.0;
  /// Overall test of all non-intercept coefficients: an F(df1, df2) for
  /// OLS/WLS, a Wald chi2(df1) for 2SLS (df2 = 0).
  double f_stat = 0.0;
  int f_df1 = 0;
  int f_df2 = 0;
  double f_p = 1.0;
  Vector residuals;
  Vector fitted;
  int n = 0;
  int k = 0;
  /// Index of the all-ones column, or -1.
  int intercept = -1;
  /// Design and response as estimated (before any weighting).
  Matrix X;
  Vector y;
  Vector weights;
  std::vector<FirstStage> first_stage;
  std::vector<std::string> warnings;

  /// Coefficient index by name, or -1.
  int index_of(std::string_view name) const;
};

/// z-scores with the n-1 standard deviation. Throws ZeroVariance.
std::vector<double> standardize(std::span<const double> values);

ModelResult ols(const Matrix& X, const Vector& y, SeType se = SeType::HC1,
                std::vector<std::string> names = {});

/// OLS on rows scaled by sqrt(weight). Throws NonPositiveWeight.
ModelResult wls(const Matrix& X, const Vector& y, const Vector& weights,
                SeType se = SeType::HC1, std::vector<std::string> names = {});

/// Two-stage least squares. `endogenous` lists columns of X; `instruments`
/// holds the excluded instruments. The remaining columns of X instrument
/// themselves. Throws OrderCondition when there are fewer excluded
/// instruments than endogenous columns.
ModelResult tsls(const Matrix& X, const Vector& y, std::span<const int> endogenous,
                 const Matrix& instruments, SeType se = SeType::HC1,
                 std::vector<std::string> names = {},
                 std::vector<std::string> instrument_names = {});

/// Pearson correlations; NaN marks pairs involving a constant column.
Matrix correlation_matrix(const Matrix& columns);

/// Vertex -b1 / (2 b2) of b1 x + b2 x^2. Throws ZeroQuadratic.
double turning_point(double beta_linear, double beta_quad);

struct TestResult {
  std::string name;
  /// "chi2" or "F".
  std::string distribution;
  double statistic = 0.0;
  int df1 = 0;
  int df2 = 0;
  double p = 1.0;
};

enum class BpVariant { Fitted, Regressors };
/// Koenker form: n R^2 of squared residuals on the fitted values or on the
/// non-intercept regressors.
TestResult bp_test(const ModelResult& result, BpVariant variant = BpVariant::Fitted);

enum class ResetVariant { FittedPowers, RegressorPowers };
/// Adds powers 2..max_power of the fitted values (or of each regressor,
/// skipping terms already spanned) and F-tests them jointly.
TestResult reset_test(const ModelResult& result, ResetVariant variant = ResetVariant::FittedPowers,
                      int max_power = 4);

struct DwhResult {
  TestResult score;
  TestResult f;
};

/// Control-function endogeneity test: heteroscedasticity-robust F on the
/// first-stage residuals added to the structural equation, plus the
/// robust score form computed from the restricted OLS residuals.
DwhResult dwh_test(const Matrix& X, const Vector& y, std::span<const int> endogenous,
                   const Matrix& instruments);

/// Upper-tail probabilities.
double chi2_sf(double x, double df);
double f_sf(double x, double df1, double df2);
double t_two_sided(double t, double df);
double normal_two_sided(double z);

}  // namespace equinet
