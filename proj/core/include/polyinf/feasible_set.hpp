#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "polyinf/data_model.hpp"

namespace polyinf {

/// Constraint on one row v of [A B]:  lo <= G' v <= hi  entrywise.
/// Infinite entries of lo or hi mark absent one-sided constraints.
struct RowPolyhedron {
  MatrixXd G;  // (n+m) x M, columns are the constraint normals
  VectorXd lo;
  VectorXd hi;
  int row_index = 0;

  int dim() const { return static_cast<int>(G.rows()); }
  int constraint_count() const { return static_cast<int>(G.cols()); }

  /// Largest violation of the constraints at v (<= 0 when feasible).
  double max_violation(const VectorXd& v) const;
  /// Tolerance is relative to 1 + |g_i' v|.
  bool contains(const VectorXd& v, double tol) const;

  /// Inequality form A v <= b with infinite sides dropped.
  void as_inequalities(MatrixXd& A, VectorXd& b) const;
};

enum class Boundedness { kBounded, kUnbounded, kUndetermined };

std::string to_string(Boundedness b);
Boundedness boundedness_from_string(const std::string& s);

/// The set of pairs (A, B) consistent with the data and the cross-covariance
/// bounds. The constraints never couple distinct rows of [A B], so the set is
/// the Cartesian product of the row polyhedra.
struct FeasibleSet {
  int n = 0;
  int m = 0;
  std::vector<RowPolyhedron> rows;
  Boundedness bounded = Boundedness::kUndetermined;
  double rank_tolerance = 1e-10;
  /// sigma_{n+m} / sigma_max of G (0 when G has fewer columns than n+m).
  double singular_value_ratio = 0.0;

  int instrument_count() const { return rows.empty() ? 0 : rows.front().constraint_count(); }
};

/// Rank decision: ratio < tol -> unbounded, ratio >= 100 tol -> bounded,
/// otherwise undetermined.
Boundedness classify_rank(const MatrixXd& G, double tol, double* ratio = nullptr);

FeasibleSet build_feasible_set(const CrossCovSummary& summary, const CrossCovBounds& bounds,
                               double tol = 1e-10);

/// Membership of (A, B); each constraint is checked with slack
/// tol * (1 + |lhs|).
bool contains(const FeasibleSet& set, const SystemPair& sys, double tol = 1e-9);

/// Decided by one LP per row.
bool is_empty(const FeasibleSet& set, double tol = 1e-9);

bool is_empty(const RowPolyhedron& row, double tol = 1e-9);

}  // namespace polyinf
