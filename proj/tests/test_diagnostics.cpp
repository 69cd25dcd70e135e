#include <gtest/gtest.h>

#include <cmath>

#include "econ_fixture.hpp"
#include "equinet/econometrics.hpp"
#include "equinet/error.hpp"
#include "monte_carlo.hpp"
#include "oracles.hpp"

using namespace equinet;

namespace {

double rss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  return (y - X * oracle::normal_equations(X, y)).squaredNorm();
}

double r_squared(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const double sst = (y.array() - y.mean()).square().sum();
  return 1.0 - rss(X, y) / sst;
}

Eigen::MatrixXd hstack(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

}  // namespace

TEST(BreuschPagan, MatchesAuxiliaryRegression) {
  const auto d = fixture::make(200, 6, 11);
  const auto r = ols(d.X, d.y);
  const Eigen::VectorXd u2 = r.residuals.array().square();

  const auto fitted = bp_test(r, BpVariant::Fitted);
  Eigen::MatrixXd A(200, 2);
  A << Eigen::VectorXd::Ones(200), d.X * r.coefficients;
  EXPECT_NEAR(fitted.statistic, 200.0 * r_squared(A, u2), 1e-8);
  EXPECT_EQ(fitted.df1, 1);
  EXPECT_EQ(fitted.distribution, "chi2");
  EXPECT_NEAR(fitted.p, chi2_sf(fitted.statistic, 1), 1e-15);

  const auto regs = bp_test(r, BpVariant::Regressors);
  EXPECT_NEAR(regs.statistic, 200.0 * r_squared(d.X, u2), 1e-8);
  EXPECT_EQ(regs.df1, 5);
  // the fixture is heteroscedastic in column 2
  EXPECT_LT(regs.p, 0.01);
}

TEST(BreuschPagan, WeightedResiduals) {
  const auto d = fixture::make(200, 5, 12);
  const auto r = wls(d.X, d.y, d.w);
  const Eigen::VectorXd sw = d.w.cwiseSqrt();
  const Eigen::VectorXd u2 = (sw.array() * r.residuals.array()).square();
  // auxiliary regression on the scaled regressors of the transformed model,
  // with a fresh constant in place of the scaled intercept
  Eigen::MatrixXd A(200, 5);
  A << Eigen::VectorXd::Ones(200), sw.asDiagonal() * d.X.rightCols(4);
  const auto t = bp_test(r, BpVariant::Regressors);
  EXPECT_NEAR(t.statistic, 200.0 * r_squared(A, u2), 1e-8);
  EXPECT_EQ(t.df1, 4);
}

TEST(BreuschPagan, RegressorCountForGroupOneShape) {
  const Eigen::MatrixXd X = fixture::group_one_shape(2500, 5);
  Rng rng(6);
  Eigen::VectorXd y(2500);
  for (int i = 0; i < 2500; ++i) y(i) = X.row(i).sum() + rng.normal();
  const auto r = ols(X, y);
  EXPECT_EQ(bp_test(r, BpVariant::Regressors).df1, 20);
  EXPECT_EQ(bp_test(r, BpVariant::Fitted).df1, 1);
  // squares of dummies are the dummies, npf_d^2 is already a regressor
  // and (npf_d^2)^2 = npf_d^4 duplicates a term: 7 * 3 - 2 = 19
  const auto reset = reset_test(r, ResetVariant::RegressorPowers);
  EXPECT_EQ(reset.df1, 19);
  EXPECT_EQ(reset.df2, 2500 - 21 - 19);
}

TEST(Reset, MatchesAugmentedRegression) {
  const auto d = fixture::make(200, 5, 13);
  const auto r = ols(d.X, d.y);
  const Eigen::VectorXd f = d.X * r.coefficients;
  const Eigen::VectorXd c = (f.array() - f.mean()) / std::sqrt((f.array() - f.mean()).square().sum() / 199.0);
  Eigen::MatrixXd P(200, 3);
  P << c.array().square().matrix(), c.array().cube().matrix(), c.array().pow(4).matrix();
  const double rr = rss(d.X, d.y);
  const double ru = rss(hstack(d.X, P), d.y);
  const auto t = reset_test(r);
  EXPECT_EQ(t.df1, 3);
  EXPECT_EQ(t.df2, 200 - 5 - 3);
  EXPECT_NEAR(t.statistic, ((rr - ru) / 3) / (ru / 192), 1e-8);
  EXPECT_EQ(t.distribution, "F");
  EXPECT_EQ(reset_test(r, ResetVariant::FittedPowers, 2).df1, 1);
}

TEST(Dwh, MatchesControlFunctionRegression) {
  const auto d = fixture::make(200, 6, 14);
  const std::vector<int> endo{1};
  Eigen::MatrixXd Z(200, 6);
  Z << d.X.col(0), d.z, d.X.rightCols(4);
  const Eigen::VectorXd x1 = d.X.col(1);
  const Eigen::VectorXd vhat = x1 - Z * oracle::normal_equations(Z, x1);
  const Eigen::MatrixXd A = hstack(d.X, vhat);
  const Eigen::VectorXd b = oracle::normal_equations(A, d.y);
  const Eigen::VectorXd e = d.y - A * b;
  const Eigen::MatrixXd V = oracle::sandwich(A, e, true);
  const double F = b[6] * b[6] / V(6, 6);

  // score form: restricted residuals against vhat purged of X
  const Eigen::VectorXd u = d.y - d.X * oracle::normal_equations(d.X, d.y);
  const Eigen::VectorXd rv = vhat - d.X * oracle::normal_equations(d.X, vhat);
  double s = 0.0, S = 0.0;
  for (int i = 0; i < 200; ++i) {
    s += rv[i] * u[i];
    S += rv[i] * rv[i] * u[i] * u[i];
  }

  const Eigen::MatrixXd inst = d.z;
  const auto t = dwh_test(d.X, d.y, endo, inst);
  EXPECT_NEAR(t.f.statistic, F, 1e-8 * F);
  EXPECT_EQ(t.f.df1, 1);
  EXPECT_EQ(t.f.df2, 200 - 6 - 1);
  EXPECT_EQ(t.f.distribution, "F");
  EXPECT_NEAR(t.score.statistic, s * s / S, 1e-8 * s * s / S);
  EXPECT_EQ(t.score.df1, 1);
  EXPECT_EQ(t.score.distribution, "chi2");
  // fixture column 1 is endogenous by construction
  EXPECT_LT(t.f.p, 0.05);
}

// 1000 replications here; the 5000-replication version runs as an
// acceptance check.
TEST(MonteCarlo, BreuschPaganSizeAndPower) {
  const auto r = mc::bp(1000, 200, 101);
  EXPECT_GT(r.null_rate, 0.025);
  EXPECT_LT(r.null_rate, 0.075);
  EXPECT_GT(r.alt_rate, 0.95);
  const double regs = mc::bp_regressors_null(1000, 200, 103);
  EXPECT_GT(regs, 0.025);
  EXPECT_LT(regs, 0.075);
}

TEST(MonteCarlo, ResetSizeAndPower) {
  const auto r = mc::reset(1000, 200, 201);
  EXPECT_GT(r.null_rate, 0.025);
  EXPECT_LT(r.null_rate, 0.075);
  EXPECT_GT(r.alt_rate, 0.95);
}

TEST(MonteCarlo, DwhSizeAndPower) {
  for (bool use_f : {true, false}) {
    const auto r = mc::dwh(1000, 200, 301, use_f);
    EXPECT_GT(r.null_rate, 0.025) << use_f;
    EXPECT_LT(r.null_rate, 0.075) << use_f;
    EXPECT_GT(r.alt_rate, 0.95) << use_f;
  }
}

TEST(MonteCarlo, TslsRemovesEndogeneityBias) {
  const auto [tsls_mean, ols_mean] = mc::iv_bias(1000, 200, 401);
  EXPECT_NEAR(tsls_mean, 1.0, 0.05);
  // cov(x, u) / var(x) = 0.5 / 2
  EXPECT_NEAR(ols_mean, 1.25, 0.02);
}
