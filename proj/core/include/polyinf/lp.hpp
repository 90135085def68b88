#pragma once

#include <Eigen/Dense>

namespace polyinf::lp {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
};

/// Dense two-phase simplex with Bland's rule for
///   maximize c'x  subject to  A x <= b,  x free.
/// Intended for the small row-wise polyhedra of this project (tens of rows).
LpResult maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                  const Eigen::VectorXd& c, double eps = 1e-10);

/// Feasibility of {x : A x <= b}.
bool feasible(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double eps = 1e-10);

}  // namespace polyinf::lp
