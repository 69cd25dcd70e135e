#include "equinet/econometrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "equinet/error.hpp"

namespace equinet {

std::string_view to_string(SeType se) {
  switch (se) {
    case SeType::Classical: return "classical";
    case SeType::HC0: return "robust-HC0";
    case SeType::HC1: return "robust-HC1";
  }
  return "?";
}

SeType parse_se_type(std::string_view text) {
  if (text == "classical") return SeType::Classical;
  if (text == "robust-HC0" || text == "hc0" || text == "HC0") return SeType::HC0;
  if (text == "robust-HC1" || text == "robust" || text == "hc1" || text == "HC1") {
    return SeType::HC1;
  }
  throw Error(ErrorCode::ConfigInvalid, fmt::format("unknown standard-error type '{}'", text));
}

int ModelResult::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

double chi2_sf(double x, double df) {
  if (std::isnan(x) || df <= 0) return std::numeric_limits<double>::quiet_NaN();
  if (x <= 0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), x));
}

double f_sf(double x, double df1, double df2) {
  if (std::isnan(x) || df1 <= 0 || df2 <= 0) return std::numeric_limits<double>::quiet_NaN();
  if (x <= 0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::cdf(boost::math::complement(boost::math::fisher_f(df1, df2), x));
}

double t_two_sided(double t, double df) {
  if (std::isnan(t) || df <= 0) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  return 2.0 * boost::math::cdf(boost::math::complement(boost::math::students_t(df), std::abs(t)));
}

double normal_two_sided(double z) {
  if (std::isnan(z)) return z;
  if (std::isinf(z)) return 0.0;
  return 2.0 * boost::math::cdf(boost::math::complement(boost::math::normal(), std::abs(z)));
}

std::vector<double> standardize(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2 || std::all_of(values.begin(), values.end(),
                           [&](double v) { return v == values.front(); })) {
    throw Error(ErrorCode::ZeroVariance, "standardize needs at least two distinct values");
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (values[i] - mean) / sd;
  return out;
}

namespace {

int find_intercept(const Matrix& X) {
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if ((X.col(j).array() == 1.0).all()) return static_cast<int>(j);
  }
  return -1;
}

std::vector<std::string> default_names(std::vector<std::string> names, Eigen::Index k) {
  if (names.empty()) {
    for (Eigen::Index j = 0; j < k; ++j) names.push_back(fmt::format("x{}", j));
  }
  if (static_cast<Eigen::Index>(names.size()) != k) {
    throw Error(ErrorCode::ConfigInvalid,
                fmt::format("{} names for {} columns", names.size(), k));
  }
  return names;
}

Matrix coefficient_covariance(const Matrix& Xh, const Vector& e, const Matrix& xtx_inv,
                              SeType se) {
  const double n = static_cast<double>(Xh.rows());
  const double k = static_cast<double>(Xh.cols());
  Matrix cov;
  if (se == SeType::Classical) {
    cov = (e.squaredNorm() / (n - k)) * xtx_inv;
  } else {
    const Matrix scaled = Xh.array().colwise() * e.array();
    const Matrix meat = scaled.transpose() * scaled;
    cov = xtx_inv * meat * xtx_inv;
    if (se == SeType::HC1) cov *= n / (n - k);
  }
  return (cov + cov.transpose()) / 2.0;
}

// Standard errors, tests, R^2 and the overall Wald/F test.
void finish(ModelResult& r, const Vector& w) {
  const Eigen::Index k = r.coefficients.size();
  r.standard_errors = r.covariance.diagonal().array().sqrt();
  r.t_stats = r.coefficients.array() / r.standard_errors.array();
  r.p_values.resize(k);
  const bool large_sample = r.estimator == Estimator::TSLS;
  for (Eigen::Index j = 0; j < k; ++j) {
    r.p_values[j] = large_sample ? normal_two_sided(r.t_stats[j])
                                 : t_two_sided(r.t_stats[j], r.n - r.k);
  }

  const double sw = w.sum();
  const double rss = (w.array() * r.residuals.array().square()).sum();
  double tss;
  if (r.intercept >= 0) {
    const double ybar = (w.array() * r.y.array()).sum() / sw;
    tss = (w.array() * (r.y.array() - ybar).square()).sum();
  } else {
    tss = (w.array() * r.y.array().square()).sum();
  }
  r.r_squared = tss > 0.0 ? 1.0 - rss / tss : std::numeric_limits<double>::quiet_NaN();

  std::vector<int> slopes;
  for (int j = 0; j < k; ++j) {
    if (j != r.intercept) slopes.push_back(j);
  }
  const int q = static_cast<int>(slopes.size());
  if (q == 0) {
    r.f_stat = std::numeric_limits<double>::quiet_NaN();
    r.f_df1 = r.f_df2 = 0;
    r.f_p = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  Vector b(q);
  Matrix V(q, q);
  for (int a = 0; a < q; ++a) {
    b[a] = r.coefficients[slopes[a]];
    for (int c = 0; c < q; ++c) V(a, c) = r.covariance(slopes[a], slopes[c]);
  }
  const double wald = b.dot(V.ldlt().solve(b));
  if (large_sample) {
    r.f_stat = wald;
    r.f_df1 = q;
    r.f_df2 = 0;
    r.f_p = chi2_sf(wald, q);
  } else {
    r.f_stat = wald / q;
    r.f_df1 = q;
    r.f_df2 = r.n - r.k;
    r.f_p = f_sf(r.f_stat, q, r.f_df2);
  }
}

ModelResult weighted_fit(const Matrix& X, const Vector& y, const Vector& w, SeType se,
                         std::vector<std::string> names, Estimator estimator) {
  if (X.rows() != y.size()) {
    throw Error(ErrorCode::ConfigInvalid, "design and response differ in length");
  }
  ModelResult r;
  r.estimator = estimator;
  r.se_type = se;
  r.names = default_names(std::move(names), X.cols());
  r.n = static_cast<int>(X.rows());
  r.k = static_cast<int>(X.cols());
  if (r.n <= r.k) {
    throw Error(ErrorCode::TooFewObservations,
                fmt::format("{} observations for {} coefficients", r.n, r.k));
  }
  const Vector sw = w.array().sqrt();
  const Matrix Xs = sw.asDiagonal() * X;
  const Vector ys = sw.asDiagonal() * y;
  const LeastSquares ls = least_squares(Xs, ys, r.names);
  r.coefficients = ls.beta;
  const Vector es = ys - Xs * ls.beta;
  r.covariance = coefficient_covariance(Xs, es, ls.xtx_inv, se);
  r.X = X;
  r.y = y;
  r.weights = w;
  r.fitted = X * ls.beta;
  r.residuals = y - r.fitted;
  r.intercept = find_intercept(X);
  finish(r, w);
  return r;
}

}  // namespace

ModelResult ols(const Matrix& X, const Vector& y, SeType se, std::vector<std::string> names) {
  return weighted_fit(X, y, Vector::Ones(X.rows()), se, std::move(names), Estimator::OLS);
}

ModelResult wls(const Matrix& X, const Vector& y, const Vector& weights, SeType se,
                std::vector<std::string> names) {
  if (weights.size() != X.rows()) {
    throw Error(ErrorCode::ConfigInvalid, "weight vector length differs from the design");
  }
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw Error(ErrorCode::NonPositiveWeight,
                  fmt::format("weight {} at row {}", weights[i], i));
    }
  }
  return weighted_fit(X, y, weights, se, std::move(names), Estimator::WLS);
}

ModelResult tsls(const Matrix& X, const Vector& y, std::span<const int> endogenous,
                 const Matrix& instruments, SeType se, std::vector<std::string> names,
                 std::vector<std::string> instrument_names) {
  const Eigen::Index n = X.rows(), k = X.cols();
  if (y.size() != n || instruments.rows() != n) {
    throw Error(ErrorCode::ConfigInvalid, "design, response and instruments differ in length");
  }
  if (endogenous.empty()) {
    throw Error(ErrorCode::OrderCondition, "no endogenous regressor given");
  }
  if (instruments.cols() < static_cast<Eigen::Index>(endogenous.size())) {
    throw Error(ErrorCode::OrderCondition,
                fmt::format("{} excluded instruments for {} endogenous regressors",
                            instruments.cols(), endogenous.size()));
  }
  names = default_names(std::move(names), k);
  if (instrument_names.empty()) {
    for (Eigen::Index j = 0; j < instruments.cols(); ++j) {
      instrument_names.push_back(fmt::format("z{}", j));
    }
  }
  std::vector<bool> is_endog(k, false);
  for (int j : endogenous) {
    if (j < 0 || j >= k) throw Error(ErrorCode::ConfigInvalid, "endogenous column out of range");
    is_endog[j] = true;
  }
  std::vector<int> exog;
  for (int j = 0; j < k; ++j) {
    if (!is_endog[j]) exog.push_back(j);
  }
  const Eigen::Index kx = static_cast<Eigen::Index>(exog.size());
  Matrix Xexog(n, kx);
  std::vector<std::string> znames;
  for (Eigen::Index a = 0; a < kx; ++a) {
    Xexog.col(a) = X.col(exog[a]);
    znames.push_back(names[exog[a]]);
  }
  Matrix Z(n, kx + instruments.cols());
  Z << Xexog, instruments;
  znames.insert(znames.end(), instrument_names.begin(), instrument_names.end());
  if (n <= Z.cols()) {
    throw Error(ErrorCode::TooFewObservations,
                fmt::format("{} observations for {} instruments", n, Z.cols()));
  }

  ModelResult r;
  r.estimator = Estimator::TSLS;
  r.se_type = se;
  r.names = names;
  r.n = static_cast<int>(n);
  r.k = static_cast<int>(k);
  if (r.n <= r.k) {
    throw Error(ErrorCode::TooFewObservations,
                fmt::format("{} observations for {} coefficients", r.n, r.k));
  }
  const bool z_intercept = find_intercept(Z) >= 0;

  Matrix Xhat = X;
  for (int j : endogenous) {
    const Vector x = X.col(j);
    const LeastSquares first = least_squares(Z, x, znames);
    const Vector xhat = Z * first.beta;
    const double rss_u = (x - xhat).squaredNorm();
    const double rss_r = kx > 0 ? residualize(Xexog, x).squaredNorm() : x.squaredNorm();
    const double tss = z_intercept ? (x.array() - x.mean()).square().sum() : x.squaredNorm();
    FirstStage fs;
    fs.endogenous = names[j];
    fs.r_squared = tss > 0.0 ? 1.0 - rss_u / tss : std::numeric_limits<double>::quiet_NaN();
    fs.df1 = static_cast<int>(instruments.cols());
    fs.df2 = static_cast<int>(n - Z.cols());
    fs.partial_f = rss_u > 0.0 ? ((rss_r - rss_u) / fs.df1) / (rss_u / fs.df2)
                               : std::numeric_limits<double>::infinity();
    if (fs.partial_f < 10.0) {
      r.warnings.push_back(fmt::format(
          "WeakInstrument: first-stage F({}, {}) = {:.3f} for {} is below 10", fs.df1, fs.df2,
          fs.partial_f, names[j]));
    }
    r.first_stage.push_back(fs);
    Xhat.col(j) = xhat;
  }

  const LeastSquares second = least_squares(Xhat, y, names);
  r.coefficients = second.beta;
  r.X = X;
  r.y = y;
  r.weights = Vector::Ones(n);
  r.fitted = X * second.beta;
  r.residuals = y - r.fitted;
  r.covariance = coefficient_covariance(Xhat, r.residuals, second.xtx_inv, se);
  r.intercept = find_intercept(X);
  finish(r, r.weights);
  return r;
}

Matrix correlation_matrix(const Matrix& columns) {
  const Eigen::Index n = columns.rows(), m = columns.cols();
  if (n < 2) throw Error(ErrorCode::TooFewObservations, "correlation needs at least two rows");
  Matrix centered = columns;
  Vector scale(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    centered.col(j).array() -= columns.col(j).mean();
    scale[j] = std::sqrt(centered.col(j).squaredNorm());
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Matrix out(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b <= a; ++b) {
      double v;
      if (scale[a] == 0.0 || scale[b] == 0.0) {
        v = nan;
      } else if (a == b) {
        v = 1.0;
      } else {
        v = centered.col(a).dot(centered.col(b)) / (scale[a] * scale[b]);
        v = std::clamp(v, -1.0, 1.0);
      }
      out(a, b) = out(b, a) = v;
    }
  }
  return out;
}

double turning_point(double beta_linear, double beta_quad) {
  if (beta_quad == 0.0 || !std::isfinite(beta_quad)) {
    throw Error(ErrorCode::ZeroQuadratic, "quadratic coefficient is zero");
  }
  // adding 0.0 folds -0 into +0
  return -beta_linear / (2.0 * beta_quad) + 0.0;
}

}  // namespace equinet
