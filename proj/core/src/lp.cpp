#include "polyinf/lp.hpp"

#include <limits>
#include <vector>

namespace polyinf::lp {

namespace {

// Tableau simplex over x >= 0 with an auxiliary column for phase one.
class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
          double eps)
      : m_(static_cast<int>(b.size())),
        n_(static_cast<int>(c.size())),
        eps_(eps),
        basis_(m_),
        nonbasis_(n_ + 1),
        D_(Eigen::MatrixXd::Zero(m_ + 2, n_ + 2)) {
    D_.topLeftCorner(m_, n_) = A;
    for (int i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      D_(i, n_) = -1.0;
      D_(i, n_ + 1) = b(i);
    }
    for (int j = 0; j < n_; ++j) {
      nonbasis_[j] = j;
      D_(m_, j) = -c(j);
    }
    nonbasis_[n_] = -1;
    D_(m_ + 1, n_) = 1.0;
  }

  LpResult solve() {
    LpResult result;
    int r = 0;
    for (int i = 1; i < m_; ++i)
      if (D_(i, n_ + 1) < D_(r, n_ + 1)) r = i;
    if (D_(r, n_ + 1) < -eps_) {
      pivot(r, n_);
      if (!run(true) || D_(m_ + 1, n_ + 1) < -eps_) {
        result.status = LpStatus::kInfeasible;
        return result;
      }
      for (int i = 0; i < m_; ++i) {
        if (basis_[i] != -1) continue;
        int s = -1;
        for (int j = 0; j <= n_; ++j)
          if (s == -1 || D_(i, j) < D_(i, s) ||
              (D_(i, j) == D_(i, s) && nonbasis_[j] < nonbasis_[s]))
            s = j;
        pivot(i, s);
      }
    }
    if (!run(false)) {
      result.status = LpStatus::kUnbounded;
      return result;
    }
    result.status = LpStatus::kOptimal;
    result.x = Eigen::VectorXd::Zero(n_);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] >= 0 && basis_[i] < n_) result.x(basis_[i]) = D_(i, n_ + 1);
    result.objective = D_(m_, n_ + 1);
    return result;
  }

 private:
  void pivot(int r, int s) {
    const double inv = 1.0 / D_(r, s);
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      const double f = D_(i, s) * inv;
      if (f == 0.0) continue;
      for (int j = 0; j < n_ + 2; ++j)
        if (j != s) D_(i, j) -= D_(r, j) * f;
    }
    for (int j = 0; j < n_ + 2; ++j)
      if (j != s) D_(r, j) *= inv;
    for (int i = 0; i < m_ + 2; ++i)
      if (i != r) D_(i, s) *= -inv;
    D_(r, s) = inv;
    std::swap(basis_[r], nonbasis_[s]);
  }

  // Bland's rule: smallest-index entering and leaving variables.
  bool run(bool phase_one) {
    const int obj = phase_one ? m_ + 1 : m_;
    while (true) {
      int s = -1;
      for (int j = 0; j <= n_; ++j) {
        if (!phase_one && nonbasis_[j] == -1) continue;
        if (D_(obj, j) < -eps_ && (s == -1 || nonbasis_[j] < nonbasis_[s])) s = j;
      }
      if (s == -1) return true;
      int r = -1;
      for (int i = 0; i < m_; ++i) {
        if (D_(i, s) < eps_) continue;
        if (r == -1) {
          r = i;
          continue;
        }
        const double lhs = D_(i, n_ + 1) / D_(i, s);
        const double rhs = D_(r, n_ + 1) / D_(r, s);
        if (lhs < rhs - eps_ || (lhs <= rhs + eps_ && basis_[i] < basis_[r])) r = i;
      }
      if (r == -1) return false;
      pivot(r, s);
    }
  }

  int m_;
  int n_;
  double eps_;
  std::vector<int> basis_;
  std::vector<int> nonbasis_;
  Eigen::MatrixXd D_;
};

}  // namespace

LpResult maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                  double eps) {
  const int n = static_cast<int>(c.size());
  // Normalize rows; zero rows are either trivially satisfied or infeasible.
  std::vector<int> keep;
  for (int i = 0; i < A.rows(); ++i) {
    if (A.row(i).norm() > 0.0) {
      keep.push_back(i);
    } else if (b(i) < -eps) {
      return {LpStatus::kInfeasible, {}, 0.0};
    }
  }
  const int m = static_cast<int>(keep.size());
  if (m == 0) {
    if (c.norm() > 0.0) return {LpStatus::kUnbounded, {}, 0.0};
    return {LpStatus::kOptimal, Eigen::VectorXd::Zero(n), 0.0};
  }
  Eigen::MatrixXd As(m, 2 * n);
  Eigen::VectorXd bs(m);
  for (int k = 0; k < m; ++k) {
    const double scale = 1.0 / A.row(keep[k]).norm();
    As.row(k).head(n) = scale * A.row(keep[k]);
    As.row(k).tail(n) = -scale * A.row(keep[k]);
    bs(k) = scale * b(keep[k]);
  }
  Eigen::VectorXd cs(2 * n);
  cs << c, -c;
  LpResult split = Tableau(As, bs, cs, eps).solve();
  if (split.status != LpStatus::kOptimal) return {split.status, {}, 0.0};
  LpResult result;
  result.status = LpStatus::kOptimal;
  result.x = split.x.head(n) - split.x.tail(n);
  result.objective = c.dot(result.x);
  return result;
}

bool feasible(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double eps) {
  return maximize(A, b, Eigen::VectorXd::Zero(A.cols()), eps).status != LpStatus::kInfeasible;
}

}  // namespace polyinf::lp
