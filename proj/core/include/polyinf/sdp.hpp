#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace polyinf::sdp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class VarKind { kSymmetric, kRectangular, kScalar };

struct DecisionVar {
  std::string name;
  VarKind kind = VarKind::kScalar;
  int rows = 1;
  int cols = 1;
  int offset = 0;  // first coordinate in the stacked parameter vector

  int dof() const { return kind == VarKind::kSymmetric ? rows * (rows + 1) / 2 : rows * cols; }
};

/// left * V * right, or left * V' * right when transposed.
struct Term {
  int var = 0;
  MatrixXd left;
  MatrixXd right;
  bool transposed = false;
};

/// Values of all decision variables, indexed like LmiProblem::variables().
using Assignment = std::vector<MatrixXd>;

/// constant + sum of terms, an affine matrix-valued function of the
/// decision variables.
class AffineExpr {
 public:
  AffineExpr() = default;
  AffineExpr(MatrixXd constant);  // NOLINT(google-explicit-constructor)

  static AffineExpr of_variable(const DecisionVar& var, int index);

  int rows() const { return static_cast<int>(constant_.rows()); }
  int cols() const { return static_cast<int>(constant_.cols()); }
  const MatrixXd& constant() const { return constant_; }
  const std::vector<Term>& terms() const { return terms_; }

  AffineExpr transpose() const;
  MatrixXd evaluate(const Assignment& values) const;

  AffineExpr& operator+=(const AffineExpr& other);
  AffineExpr& operator-=(const AffineExpr& other);
  AffineExpr& operator*=(double s);

  AffineExpr left_multiply(const MatrixXd& L) const;
  AffineExpr right_multiply(const MatrixXd& R) const;

  // Hidden friends, so that plain matrix arithmetic never converts to
  // AffineExpr by accident.
  friend AffineExpr operator*(const MatrixXd& L, const AffineExpr& e) { return e.left_multiply(L); }
  friend AffineExpr operator*(const AffineExpr& e, const MatrixXd& R) { return e.right_multiply(R); }
  friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
  friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
  friend AffineExpr operator-(AffineExpr a) { return a *= -1.0; }
  friend AffineExpr operator*(double s, AffineExpr e) { return e *= s; }

 private:
  MatrixXd constant_;
  std::vector<Term> terms_;
};

/// 1x1 expression trace(e) of a square expression.
AffineExpr trace(const AffineExpr& e);

/// Assembles a symmetric block matrix from affine blocks. Setting (i, j)
/// with i != j also fills (j, i) with the transpose; unset blocks are zero.
class BlockMatrix {
 public:
  explicit BlockMatrix(std::vector<int> sizes);

  void set(int i, int j, const AffineExpr& e);
  AffineExpr assemble() const;

 private:
  struct Entry {
    int i;
    int j;
    AffineExpr expr;
  };
  std::vector<int> sizes_;
  std::vector<int> offsets_;
  int total_ = 0;
  std::vector<Entry> entries_;
};

enum class Sense {
  kPositiveDefinite,  // expr >= margin * I
  kNegativeDefinite,  // expr <= -margin * I
};

struct LmiBlock {
  std::string label;
  AffineExpr expr;
  Sense sense = Sense::kPositiveDefinite;
};

class LmiProblem {
 public:
  AffineExpr symmetric(const std::string& name, int dim);
  AffineExpr rectangular(const std::string& name, int rows, int cols);
  AffineExpr scalar(const std::string& name);

  /// Strict matrix inequality expr > 0 (or < 0). The expression is
  /// symmetrized on evaluation.
  void add_lmi(const std::string& label, const AffineExpr& expr,
               Sense sense = Sense::kPositiveDefinite);

  const std::vector<DecisionVar>& variables() const { return vars_; }
  const std::vector<LmiBlock>& blocks() const { return blocks_; }
  int dof() const;
  int variable_index(const std::string& name) const;

  Assignment unpack(const VectorXd& x) const;
  VectorXd pack(const Assignment& values) const;

 private:
  AffineExpr declare(const std::string& name, VarKind kind, int rows, int cols);

  std::vector<DecisionVar> vars_;
  std::vector<LmiBlock> blocks_;
};

/// Value of a block at an assignment, symmetrized and sign-normalized so
/// that the constraint always reads "value is positive definite". This is
/// evaluated term by term and shares no code with the solver's compiled
/// representation.
MatrixXd evaluate_block(const LmiBlock& block, const Assignment& values);

double min_eigenvalue(const MatrixXd& symmetric);

/// Required margin of a block: epsilon * (1 + ||constant||_F).
double block_margin(const LmiBlock& block, double epsilon);

/// Plain-text listing of variables and blocks for debugging.
std::string dump(const LmiProblem& problem);

struct SolveOptions {
  int max_iter = 100;
  double tol = 1e-9;
  double epsilon = 1e-7;
  /// Initial bound on |x_k| for the search; enlarged on retries.
  double box_radius = 1e4;
  int box_retries = 2;
};

enum class Status { kFeasible, kInfeasible, kInconclusive };

std::string to_string(Status s);

struct BlockReport {
  std::string label;
  double min_eig = 0.0;
  double margin = 0.0;
};

struct SolveResult {
  Status status = Status::kInconclusive;
  Assignment assignment;
  std::vector<BlockReport> blocks;
  int iterations = 0;
  /// Best value of t in  max t s.t. every block - margin I >= t I (scaled).
  double best_margin = 0.0;
  /// For infeasible verdicts: no point meeting the margins exists with
  /// |x|_inf below this.
  double certificate_radius = 0.0;
  std::string message;
};

/// Engine interface so that a different conic solver can be used.
class FeasibilityEngine {
 public:
  virtual ~FeasibilityEngine() = default;
  virtual SolveResult solve(const LmiProblem& problem, const SolveOptions& opts) const = 0;
};

/// Dense primal-dual path-following method (HKM direction, Mehrotra
/// predictor-corrector) on  max t  s.t.  F_b(x) - margin_b I >= t I  plus a
/// box on x. Feasible when an iterate passes the margins; infeasible only
/// with a dual certificate.
class InteriorPointEngine final : public FeasibilityEngine {
 public:
  SolveResult solve(const LmiProblem& problem, const SolveOptions& opts) const override;
};

SolveResult solve_feasibility(const LmiProblem& problem, const SolveOptions& opts = {});

}  // namespace polyinf::sdp
