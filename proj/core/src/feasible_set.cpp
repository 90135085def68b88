#include "polyinf/feasible_set.hpp"

#include <cmath>
#include <limits>

#include "polyinf/errors.hpp"
#include "polyinf/lp.hpp"

namespace polyinf {

double RowPolyhedron::max_violation(const VectorXd& v) const {
  const VectorXd s = G.transpose() * v;
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < constraint_count(); ++i) {
    if (std::isfinite(lo(i))) worst = std::max(worst, lo(i) - s(i));
    if (std::isfinite(hi(i))) worst = std::max(worst, s(i) - hi(i));
  }
  return worst;
}

bool RowPolyhedron::contains(const VectorXd& v, double tol) const {
  const VectorXd s = G.transpose() * v;
  for (int i = 0; i < constraint_count(); ++i) {
    const double slack = tol * (1.0 + std::abs(s(i)));
    if (std::isfinite(lo(i)) && lo(i) - s(i) > slack) return false;
    if (std::isfinite(hi(i)) && s(i) - hi(i) > slack) return false;
  }
  return true;
}

void RowPolyhedron::as_inequalities(MatrixXd& A, VectorXd& b) const {
  int count = 0;
  for (int i = 0; i < constraint_count(); ++i)
    count += std::isfinite(lo(i)) + std::isfinite(hi(i));
  A.resize(count, dim());
  b.resize(count);
  int k = 0;
  for (int i = 0; i < constraint_count(); ++i) {
    if (std::isfinite(hi(i))) {
      A.row(k) = G.col(i).transpose();
      b(k++) = hi(i);
    }
    if (std::isfinite(lo(i))) {
      A.row(k) = -G.col(i).transpose();
      b(k++) = -lo(i);
    }
  }
}

std::string to_string(Boundedness b) {
  switch (b) {
    case Boundedness::kBounded:
      return "bounded";
    case Boundedness::kUnbounded:
      return "unbounded";
    case Boundedness::kUndetermined:
      return "undetermined";
  }
  return "undetermined";
}

Boundedness boundedness_from_string(const std::string& s) {
  if (s == "bounded") return Boundedness::kBounded;
  if (s == "unbounded") return Boundedness::kUnbounded;
  if (s == "undetermined") return Boundedness::kUndetermined;
  throw InputError("unknown boundedness verdict '" + s + "'");
}

Boundedness classify_rank(const MatrixXd& G, double tol, double* ratio) {
  const auto d = G.rows();
  double r = 0.0;
  if (G.cols() >= d && d > 0) {
    const VectorXd sv = Eigen::JacobiSVD<MatrixXd>(G).singularValues();
    r = sv(0) > 0.0 ? sv(d - 1) / sv(0) : 0.0;
  }
  if (ratio) *ratio = r;
  if (r < tol) return Boundedness::kUnbounded;
  if (r < 100.0 * tol) return Boundedness::kUndetermined;
  return Boundedness::kBounded;
}

FeasibleSet build_feasible_set(const CrossCovSummary& summary, const CrossCovBounds& bounds,
                               double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("build_feasible_set: tol must be positive");
  const int n = summary.n();
  const int m = summary.m();
  const int M = summary.instrument_count();
  if (summary.Rxr_minus.rows() != n || summary.Rxr_minus.cols() != M ||
      summary.Rur_minus.cols() != M)
    throw InputError("cross-covariance summary has inconsistent shapes");
  if (bounds.instrument_count() != M || bounds.n() != n)
    throw InputError("bounds must be M x n = " + std::to_string(M) + " x " + std::to_string(n) +
                     ", got " + std::to_string(bounds.instrument_count()) + " x " +
                     std::to_string(bounds.n()));

  MatrixXd G(n + m, M);
  G << summary.Rxr_minus, summary.Rur_minus;

  FeasibleSet set;
  set.n = n;
  set.m = m;
  set.rank_tolerance = tol;
  set.bounded = classify_rank(G, tol, &set.singular_value_ratio);
  set.rows.reserve(n);
  for (int j = 0; j < n; ++j) {
    RowPolyhedron row;
    row.G = G;
    // C_l <= Rxr+ - [A B] G <= C_u, read on row j
    row.lo = summary.Rxr_plus.row(j).transpose() - bounds.C_u().col(j);
    row.hi = summary.Rxr_plus.row(j).transpose() - bounds.C_l().col(j);
    row.row_index = j;
    set.rows.push_back(std::move(row));
  }
  return set;
}

bool contains(const FeasibleSet& set, const SystemPair& sys, double tol) {
  if (sys.n() != set.n || sys.m() != set.m || sys.A.cols() != set.n || sys.B.rows() != set.n)
    throw std::invalid_argument("contains: system dimensions do not match the set");
  const MatrixXd AB = sys.stacked();
  for (const auto& row : set.rows)
    if (!row.contains(AB.row(row.row_index).transpose(), tol)) return false;
  return true;
}

bool is_empty(const RowPolyhedron& row, double tol) {
  MatrixXd A;
  VectorXd b;
  row.as_inequalities(A, b);
  // Equality windows lo == hi stay feasible under a relative slack of tol.
  for (int k = 0; k < b.size(); ++k) b(k) += tol * (1.0 + std::abs(b(k)));
  return !lp::feasible(A, b);
}

bool is_empty(const FeasibleSet& set, double tol) {
  for (const auto& row : set.rows)
    if (is_empty(row, tol)) return true;
  return false;
}

}  // namespace polyinf
