#include "equinet/linalg.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "equinet/error.hpp"

namespace equinet {

namespace {

std::string column_name(std::span<const std::string> names, Eigen::Index j) {
  if (j < static_cast<Eigen::Index>(names.size())) return names[j];
  return fmt::format("column {}", j);
}

thread_local double current_tolerance = kRankTolerance;

// Reciprocal column norms; rank is judged on the unit-norm columns so a
// regressor measured in large units cannot mask the others.
Vector column_scales(const Matrix& X) {
  Vector d(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double norm = X.col(j).norm();
    d(j) = norm > 0.0 ? 1.0 / norm : 1.0;
  }
  return d;
}

}  // namespace

double rank_tolerance() { return current_tolerance; }

RankToleranceScope::RankToleranceScope(double tolerance) : previous_(current_tolerance) {
  current_tolerance = tolerance;
}

RankToleranceScope::~RankToleranceScope() { current_tolerance = previous_; }

LeastSquares least_squares(const Matrix& X, const Vector& y, std::span<const std::string> names) {
  const double tolerance = current_tolerance;
  const Eigen::Index k = X.cols();
  if (X.rows() < k || k == 0) {
    throw Error(ErrorCode::TooFewObservations,
                fmt::format("{} observations for {} columns", X.rows(), k));
  }
  const Vector d = column_scales(X);
  Eigen::ColPivHouseholderQR<Matrix> qr(X * d.asDiagonal());
  qr.setThreshold(tolerance);
  if (qr.rank() < k) {
    // every column taking part in a dependency: the ones beyond the rank plus
    // the kept columns that reproduce them
    const Eigen::Index r = qr.rank();
    const auto& perm = qr.colsPermutation().indices();
    const Matrix R = qr.matrixR().triangularView<Eigen::Upper>();
    const Matrix coef = R.topLeftCorner(r, r).triangularView<Eigen::Upper>().solve(
        R.topRightCorner(r, k - r));
    std::vector<Eigen::Index> involved;
    for (Eigen::Index j = r; j < k; ++j) involved.push_back(perm[j]);
    for (Eigen::Index i = 0; i < r; ++i) {
      if (coef.row(i).cwiseAbs().maxCoeff() > 1e-6) involved.push_back(perm[i]);
    }
    std::sort(involved.begin(), involved.end());
    std::string list;
    for (auto j : involved) {
      if (!list.empty()) list += ", ";
      list += column_name(names, j);
    }
    throw Error(ErrorCode::RankDeficient,
                fmt::format("design has rank {} < {}; collinear: {}", r, k, list));
  }
  LeastSquares out;
  out.beta = d.asDiagonal() * qr.solve(y);
  const Matrix R = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const Matrix rinv =
      R.triangularView<Eigen::Upper>().solve(Matrix::Identity(k, k));
  const Matrix inner = rinv * rinv.transpose();
  // undo the column permutation: X P = Q R
  const auto P = qr.colsPermutation();
  out.xtx_inv = d.asDiagonal() * (P * inner * P.transpose()) * d.asDiagonal();
  return out;
}

int numerical_rank(const Matrix& X) {
  const double tolerance = current_tolerance;
  if (X.cols() == 0) return 0;
  Eigen::ColPivHouseholderQR<Matrix> qr(X * column_scales(X).asDiagonal());
  qr.setThreshold(tolerance);
  return static_cast<int>(qr.rank());
}

Vector residualize(const Matrix& X, const Vector& y) {
  const Matrix scaled = X * column_scales(X).asDiagonal();
  Eigen::ColPivHouseholderQR<Matrix> qr(scaled);
  qr.setThreshold(current_tolerance);
  return y - scaled * qr.solve(y);
}

}  // namespace equinet
