#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace equinet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Default relative pivot tolerance used to decide numerical rank.
inline constexpr double kRankTolerance = 1e-10;

/// Tolerance in effect on this thread.
double rank_tolerance();

/// Overrides the rank tolerance on this thread until destroyed.
class RankToleranceScope {
 public:
  explicit RankToleranceScope(double tolerance);
  ~RankToleranceScope();
  RankToleranceScope(const RankToleranceScope&) = delete;
  RankToleranceScope& operator=(const RankToleranceScope&) = delete;

 private:
  double previous_;
};

struct LeastSquares {
  Vector beta;
  /// (X'X)^-1 assembled from the triangular factor.
  Matrix xtx_inv;
};

/// Column-pivoted Householder QR solve. Throws RankDeficient naming the
/// columns that fall beyond the numerical rank (names may be empty).
LeastSquares least_squares(const Matrix& X, const Vector& y,
                           std::span<const std::string> names = {});

/// Numerical rank under the same rule.
int numerical_rank(const Matrix& X);

/// Residuals of y after projecting onto the columns of X.
Vector residualize(const Matrix& X, const Vector& y);

}  // namespace equinet
