#include <cmath>

#include <fmt/format.h>

#include "equinet/econometrics.hpp"
#include "equinet/error.hpp"

namespace equinet {

namespace {

// Terms whose residual on the current design is below this share of their
// own norm add nothing and are skipped.
constexpr double kSpanTolerance = 1e-9;

Vector zscore(const Vector& v) {
  const double mean = v.mean();
  const double ss = (v.array() - mean).square().sum();
  if (v.size() < 2 || ss <= 0.0) return Vector();
  return (v.array() - mean) / std::sqrt(ss / static_cast<double>(v.size() - 1));
}

Matrix append_column(const Matrix& X, const Vector& c) {
  Matrix out(X.rows(), X.cols() + 1);
  out << X, c;
  return out;
}

Matrix intercept_and(const Matrix& cols) {
  Matrix out(cols.rows(), cols.cols() + 1);
  out << Vector::Ones(cols.rows()), cols;
  return out;
}

}  // namespace

TestResult bp_test(const ModelResult& result, BpVariant variant) {
  const Vector sw = result.weights.size() ? Vector(result.weights.array().sqrt())
                                          : Vector(Vector::Ones(result.n));
  const Vector e = sw.asDiagonal() * result.residuals;
  const Vector e2 = e.array().square();
  Matrix aux;
  std::vector<std::string> names{"_cons"};
  if (variant == BpVariant::Fitted) {
    aux = intercept_and(sw.asDiagonal() * result.fitted);
    names.push_back("fitted");
  } else {
    std::vector<int> keep;
    for (int j = 0; j < result.k; ++j) {
      if (j != result.intercept) keep.push_back(j);
    }
    Matrix cols(result.n, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t a = 0; a < keep.size(); ++a) {
      cols.col(static_cast<Eigen::Index>(a)) = sw.asDiagonal() * result.X.col(keep[a]);
      names.push_back(result.names[keep[a]]);
    }
    aux = intercept_and(cols);
  }
  const ModelResult fit = ols(aux, e2, SeType::Classical, names);
  TestResult t;
  t.name = variant == BpVariant::Fitted ? "Breusch-Pagan (fitted)" : "Breusch-Pagan (regressors)";
  t.distribution = "chi2";
  t.df1 = static_cast<int>(aux.cols()) - 1;
  t.statistic = static_cast<double>(result.n) * fit.r_squared;
  t.p = chi2_sf(t.statistic, t.df1);
  return t;
}

TestResult reset_test(const ModelResult& result, ResetVariant variant, int max_power) {
  if (max_power < 2) throw Error(ErrorCode::ConfigInvalid, "RESET needs powers of at least 2");
  const Vector sw = result.weights.size() ? Vector(result.weights.array().sqrt())
                                          : Vector(Vector::Ones(result.n));
  const Matrix Xs = sw.asDiagonal() * result.X;
  const Vector ys = sw.asDiagonal() * result.y;

  // Powers of z-scored bases span the same space as raw powers once the
  // intercept is present, and are far better conditioned.
  std::vector<Vector> bases;
  if (variant == ResetVariant::FittedPowers) {
    Vector z = zscore(result.X * result.coefficients);
    if (z.size()) bases.push_back(std::move(z));
  } else {
    for (int j = 0; j < result.k; ++j) {
      if (j == result.intercept) continue;
      Vector z = zscore(result.X.col(j));
      if (z.size()) bases.push_back(std::move(z));
    }
  }

  Matrix design = Xs;
  int added = 0;
  for (const auto& base : bases) {
    for (int p = 2; p <= max_power; ++p) {
      const Vector term = sw.asDiagonal() * Vector(base.array().pow(p));
      const double norm = term.norm();
      if (norm == 0.0) continue;
      if (residualize(design, term).norm() <= kSpanTolerance * norm) continue;
      design = append_column(design, term);
      ++added;
    }
  }
  if (added == 0) {
    throw Error(ErrorCode::RankDeficient, "every RESET term is collinear with the model");
  }
  const double rss_r = residualize(Xs, ys).squaredNorm();
  const LeastSquares full = least_squares(design, ys);
  const double rss_u = (ys - design * full.beta).squaredNorm();

  TestResult t;
  t.name = variant == ResetVariant::FittedPowers ? "RESET (fitted powers)"
                                                 : "RESET (regressor powers)";
  t.distribution = "F";
  t.df1 = added;
  t.df2 = result.n - static_cast<int>(design.cols());
  if (t.df2 <= 0) {
    throw Error(ErrorCode::TooFewObservations, "too few observations for the RESET terms");
  }
  t.statistic = ((rss_r - rss_u) / t.df1) / (rss_u / t.df2);
  t.p = f_sf(t.statistic, t.df1, t.df2);
  return t;
}

DwhResult dwh_test(const Matrix& X, const Vector& y, std::span<const int> endogenous,
                   const Matrix& instruments) {
  const Eigen::Index n = X.rows(), k = X.cols();
  if (instruments.cols() < static_cast<Eigen::Index>(endogenous.size()) || endogenous.empty()) {
    throw Error(ErrorCode::OrderCondition,
                fmt::format("{} excluded instruments for {} endogenous regressors",
                            instruments.cols(), endogenous.size()));
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
  Matrix Z(n, static_cast<Eigen::Index>(exog.size()) + instruments.cols());
  for (std::size_t a = 0; a < exog.size(); ++a) Z.col(static_cast<Eigen::Index>(a)) = X.col(exog[a]);
  Z.rightCols(instruments.cols()) = instruments;
  if (numerical_rank(Z) < Z.cols()) {
    throw Error(ErrorCode::RankDeficient, "instrument matrix is rank deficient");
  }

  const auto q = static_cast<Eigen::Index>(endogenous.size());
  Matrix V(n, q);
  for (Eigen::Index a = 0; a < q; ++a) V.col(a) = residualize(Z, X.col(endogenous[a]));

  // Augmented regression with HC1 covariance; Wald test on the controls.
  Matrix Xa(n, k + q);
  Xa << X, V;
  const ModelResult aug = ols(Xa, y, SeType::HC1);
  const Vector b = aug.coefficients.tail(q);
  const Matrix Vb = aug.covariance.bottomRightCorner(q, q);
  const double wald = b.dot(Vb.ldlt().solve(b));

  DwhResult out;
  out.f.name = "DWH robust regression F";
  out.f.distribution = "F";
  out.f.df1 = static_cast<int>(q);
  out.f.df2 = static_cast<int>(n - k - q);
  out.f.statistic = wald / static_cast<double>(q);
  out.f.p = f_sf(out.f.statistic, out.f.df1, out.f.df2);

  // Robust score: restricted residuals u, controls partialled on X.
  const Vector u = residualize(X, y);
  Matrix R(n, q);
  for (Eigen::Index a = 0; a < q; ++a) R.col(a) = residualize(X, V.col(a));
  const Matrix ur = R.array().colwise() * u.array();
  const Vector s = ur.colwise().sum().transpose();
  const Matrix S = ur.transpose() * ur;
  out.score.name = "DWH robust score";
  out.score.distribution = "chi2";
  out.score.df1 = static_cast<int>(q);
  out.score.statistic = s.dot(S.ldlt().solve(s));
  out.score.p = chi2_sf(out.score.statistic, out.score.df1);
  return out;
}

}  // namespace equinet
