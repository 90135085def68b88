#include "polyinf/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace polyinf::sdp {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

MatrixXd sym(const MatrixXd& M) { return 0.5 * (M + M.transpose()); }

// Basis matrix of coordinate k of a variable.
MatrixXd basis_matrix(const DecisionVar& v, int k) {
  MatrixXd B = MatrixXd::Zero(v.rows, v.cols);
  if (v.kind == VarKind::kSymmetric) {
    int idx = 0;
    for (int j = 0; j < v.rows; ++j)
      for (int i = 0; i <= j; ++i, ++idx)
        if (idx == k) {
          B(i, j) = 1.0;
          B(j, i) = 1.0;
          return B;
        }
  }
  B(k % v.rows, k / v.rows) = 1.0;
  return B;
}

}  // namespace

// ---------------------------------------------------------------------------
// Expressions

AffineExpr::AffineExpr(MatrixXd constant) : constant_(std::move(constant)) {}

AffineExpr AffineExpr::of_variable(const DecisionVar& var, int index) {
  AffineExpr e(MatrixXd::Zero(var.rows, var.cols));
  e.terms_.push_back({index, MatrixXd::Identity(var.rows, var.rows),
                      MatrixXd::Identity(var.cols, var.cols), false});
  return e;
}

AffineExpr AffineExpr::transpose() const {
  AffineExpr t(constant_.transpose());
  for (const auto& term : terms_)
    t.terms_.push_back({term.var, term.right.transpose(), term.left.transpose(), !term.transposed});
  return t;
}

MatrixXd AffineExpr::evaluate(const Assignment& values) const {
  MatrixXd out = constant_;
  for (const auto& term : terms_) {
    require(term.var >= 0 && term.var < static_cast<int>(values.size()),
            "evaluate: assignment is missing a variable");
    const MatrixXd& V = values[term.var];
    if (term.transposed) {
      out += term.left * V.transpose() * term.right;
    } else {
      out += term.left * V * term.right;
    }
  }
  return out;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& other) {
  require(rows() == other.rows() && cols() == other.cols(), "expression sum: shape mismatch");
  constant_ += other.constant_;
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& other) {
  AffineExpr neg = other;
  neg *= -1.0;
  return *this += neg;
}

AffineExpr& AffineExpr::operator*=(double s) {
  constant_ *= s;
  for (auto& term : terms_) term.left *= s;
  return *this;
}

AffineExpr AffineExpr::left_multiply(const MatrixXd& L) const {
  require(L.cols() == rows(), "left product: shape mismatch");
  AffineExpr out(MatrixXd(L * constant_));
  for (const auto& term : terms_)
    out.terms_.push_back({term.var, L * term.left, term.right, term.transposed});
  return out;
}

AffineExpr AffineExpr::right_multiply(const MatrixXd& R) const {
  require(cols() == R.rows(), "right product: shape mismatch");
  AffineExpr out(MatrixXd(constant_ * R));
  for (const auto& term : terms_)
    out.terms_.push_back({term.var, term.left, term.right * R, term.transposed});
  return out;
}

AffineExpr trace(const AffineExpr& e) {
  require(e.rows() == e.cols(), "trace: expression must be square");
  AffineExpr out(MatrixXd::Zero(1, 1));
  for (int k = 0; k < e.rows(); ++k) {
    const MatrixXd ek = MatrixXd::Identity(e.rows(), e.rows()).col(k);
    const MatrixXd ekt = ek.transpose();
    out += ekt * e * ek;
  }
  return out;
}

BlockMatrix::BlockMatrix(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  for (int s : sizes_) {
    require(s > 0, "BlockMatrix: block sizes must be positive");
    offsets_.push_back(total_);
    total_ += s;
  }
}

void BlockMatrix::set(int i, int j, const AffineExpr& e) {
  const int nb = static_cast<int>(sizes_.size());
  require(i >= 0 && j >= 0 && i < nb && j < nb, "BlockMatrix::set: index out of range");
  require(e.rows() == sizes_[i] && e.cols() == sizes_[j], "BlockMatrix::set: block shape mismatch");
  for (const auto& entry : entries_)
    require(!((entry.i == i && entry.j == j) || (entry.i == j && entry.j == i)),
            "BlockMatrix::set: block already set");
  entries_.push_back({i, j, e});
}

AffineExpr BlockMatrix::assemble() const {
  AffineExpr out(MatrixXd::Zero(total_, total_));
  auto selector = [&](int b) {
    MatrixXd S = MatrixXd::Zero(total_, sizes_[b]);
    S.middleRows(offsets_[b], sizes_[b]).setIdentity();
    return S;
  };
  for (const auto& entry : entries_) {
    const MatrixXd Si = selector(entry.i);
    const MatrixXd Sj = selector(entry.j);
    out += Si * entry.expr * Sj.transpose();
    if (entry.i != entry.j) out += Sj * entry.expr.transpose() * Si.transpose();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Problem

AffineExpr LmiProblem::declare(const std::string& name, VarKind kind, int rows, int cols) {
  require(!name.empty(), "variable name must not be empty");
  require(rows > 0 && cols > 0, "variable '" + name + "' must have positive dimensions");
  for (const auto& v : vars_) require(v.name != name, "duplicate variable name '" + name + "'");
  DecisionVar v{name, kind, rows, cols, dof()};
  vars_.push_back(v);
  return AffineExpr::of_variable(v, static_cast<int>(vars_.size()) - 1);
}

AffineExpr LmiProblem::symmetric(const std::string& name, int dim) {
  return declare(name, VarKind::kSymmetric, dim, dim);
}
AffineExpr LmiProblem::rectangular(const std::string& name, int rows, int cols) {
  return declare(name, VarKind::kRectangular, rows, cols);
}
AffineExpr LmiProblem::scalar(const std::string& name) {
  return declare(name, VarKind::kScalar, 1, 1);
}

void LmiProblem::add_lmi(const std::string& label, const AffineExpr& expr, Sense sense) {
  require(expr.rows() == expr.cols() && expr.rows() > 0, "LMI '" + label + "' must be square");
  for (const auto& term : expr.terms()) {
    require(term.var >= 0 && term.var < static_cast<int>(vars_.size()),
            "LMI '" + label + "' references an undeclared variable");
    const auto& v = vars_[term.var];
    const int vr = term.transposed ? v.cols : v.rows;
    const int vc = term.transposed ? v.rows : v.cols;
    require(term.left.cols() == vr && term.right.rows() == vc &&
                term.left.rows() == expr.rows() && term.right.cols() == expr.cols(),
            "LMI '" + label + "': term dimensions are inconsistent");
  }
  blocks_.push_back({label, expr, sense});
}

int LmiProblem::dof() const {
  int total = 0;
  for (const auto& v : vars_) total += v.dof();
  return total;
}

int LmiProblem::variable_index(const std::string& name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].name == name) return static_cast<int>(i);
  throw std::out_of_range("no variable named '" + name + "'");
}

Assignment LmiProblem::unpack(const VectorXd& x) const {
  require(x.size() == dof(), "unpack: wrong parameter count");
  Assignment out;
  for (const auto& v : vars_) {
    MatrixXd V = MatrixXd::Zero(v.rows, v.cols);
    for (int k = 0; k < v.dof(); ++k) V += x(v.offset + k) * basis_matrix(v, k);
    out.push_back(std::move(V));
  }
  return out;
}

VectorXd LmiProblem::pack(const Assignment& values) const {
  require(values.size() == vars_.size(), "pack: wrong variable count");
  VectorXd x(dof());
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    const auto& v = vars_[i];
    int idx = 0;
    if (v.kind == VarKind::kSymmetric) {
      for (int c = 0; c < v.rows; ++c)
        for (int r = 0; r <= c; ++r) x(v.offset + idx++) = values[i](r, c);
    } else {
      for (int c = 0; c < v.cols; ++c)
        for (int r = 0; r < v.rows; ++r) x(v.offset + idx++) = values[i](r, c);
    }
  }
  return x;
}

MatrixXd evaluate_block(const LmiBlock& block, const Assignment& values) {
  MatrixXd value = sym(block.expr.evaluate(values));
  if (block.sense == Sense::kNegativeDefinite) value = -value;
  return value;
}

double min_eigenvalue(const MatrixXd& symmetric) {
  if (symmetric.rows() == 1) return symmetric(0, 0);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double block_margin(const LmiBlock& block, double epsilon) {
  return epsilon * (1.0 + block.expr.constant().norm());
}

std::string dump(const LmiProblem& problem) {
  std::ostringstream out;
  out.precision(10);
  const char* kinds[] = {"symmetric", "rectangular", "scalar"};
  out << "variables " << problem.variables().size() << " (dof " << problem.dof() << ")\n";
  for (const auto& v : problem.variables())
    out << "  " << v.name << " " << kinds[static_cast<int>(v.kind)] << " " << v.rows << "x"
        << v.cols << "\n";
  for (const auto& b : problem.blocks()) {
    out << "block \"" << b.label << "\" "
        << (b.sense == Sense::kPositiveDefinite ? "> 0" : "< 0") << " size " << b.expr.rows()
        << "\n  constant\n"
        << b.expr.constant() << "\n";
    for (const auto& t : b.expr.terms()) {
      out << "  term " << problem.variables()[t.var].name << (t.transposed ? "'" : "")
          << "\n  left\n"
          << t.left << "\n  right\n"
          << t.right << "\n";
    }
  }
  return out.str();
}

std::string to_string(Status s) {
  switch (s) {
    case Status::kFeasible:
      return "feasible";
    case Status::kInfeasible:
      return "infeasible";
    case Status::kInconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

// ---------------------------------------------------------------------------
// Interior-point engine

namespace {

// Dual-form data:  S_b = C_b - sum_i y_i A_{i,b} >= 0,  maximize b'y.
struct ConeBlock {
  MatrixXd C;
  std::vector<std::pair<int, MatrixXd>> A;
  bool lmi = false;
  double scale = 1.0;
  MatrixXd F0;  // scaled, not shifted by the margin (lmi blocks only)
};

struct CompiledProblem {
  int dof = 0;  // y has dof + 1 entries; the last is t
  std::vector<ConeBlock> blocks;
  std::vector<double> margins;
  double epsilon = 0.0;
  /// Every LMI block has a zero constant term.
  bool homogeneous = false;
};

// Radius a certificate must reach. For general problems it has to exceed
// the search box by a wide factor. Homogeneous problems are scale
// invariant: a certificate of radius rho bounds the relative margin
// lambda_min(F(x)) / |x|_inf of every x by epsilon / rho, and a bound below
// 1e-10 is taken as infeasible.
double required_radius(const CompiledProblem& cp, double box) {
  return cp.homogeneous ? std::min(100.0 * box, cp.epsilon * 1e10) : 100.0 * box;
}

CompiledProblem compile(const LmiProblem& problem, double epsilon, double radius) {
  CompiledProblem cp;
  cp.dof = problem.dof();
  cp.epsilon = epsilon;
  cp.homogeneous = true;
  for (const auto& block : problem.blocks())
    if (block.expr.constant().cwiseAbs().maxCoeff() > 0.0) cp.homogeneous = false;
  const auto& vars = problem.variables();
  for (const auto& block : problem.blocks()) {
    const int dim = block.expr.rows();
    const double sign = block.sense == Sense::kPositiveDefinite ? 1.0 : -1.0;
    const double margin = block_margin(block, epsilon);
    cp.margins.push_back(margin);

    std::map<int, MatrixXd> coeff;
    for (const auto& term : block.expr.terms()) {
      const auto& v = vars[term.var];
      for (int k = 0; k < v.dof(); ++k) {
        const MatrixXd B = basis_matrix(v, k);
        const MatrixXd contrib = term.transposed ? MatrixXd(term.left * B.transpose() * term.right)
                                                 : MatrixXd(term.left * B * term.right);
        auto it = coeff.find(v.offset + k);
        if (it == coeff.end()) {
          coeff.emplace(v.offset + k, contrib);
        } else {
          it->second += contrib;
        }
      }
    }
    const MatrixXd F0 = sign * sym(block.expr.constant());
    double norm = (F0 - margin * MatrixXd::Identity(dim, dim)).norm();
    for (auto& [k, F] : coeff) {
      F = sign * sym(F);
      norm = std::max(norm, F.norm());
    }
    ConeBlock cb;
    cb.lmi = true;
    cb.scale = 1.0 / std::max(norm, 1e-12);
    cb.F0 = cb.scale * F0;
    cb.C = cb.scale * (F0 - margin * MatrixXd::Identity(dim, dim));
    for (const auto& [k, F] : coeff)
      if (F.norm() > 0.0) cb.A.emplace_back(k, -cb.scale * F);
    cb.A.emplace_back(cp.dof, MatrixXd::Identity(dim, dim));
    cp.blocks.push_back(std::move(cb));
  }
  // |x_k| <= radius, written as 1 -+ x_k / radius >= 0
  for (int k = 0; k < cp.dof; ++k) {
    for (double s : {1.0, -1.0}) {
      ConeBlock cb;
      cb.C = MatrixXd::Ones(1, 1);
      cb.A.emplace_back(k, MatrixXd::Constant(1, 1, s / radius));
      cp.blocks.push_back(std::move(cb));
    }
  }
  return cp;
}

using Blocks = std::vector<MatrixXd>;

double inner(const Blocks& X, const Blocks& S) {
  double s = 0.0;
  for (std::size_t b = 0; b < X.size(); ++b) s += X[b].cwiseProduct(S[b]).sum();
  return s;
}

VectorXd apply_A(const CompiledProblem& cp, const Blocks& W) {
  VectorXd out = VectorXd::Zero(cp.dof + 1);
  for (std::size_t b = 0; b < cp.blocks.size(); ++b)
    for (const auto& [i, A] : cp.blocks[b].A) out(i) += A.cwiseProduct(W[b]).sum();
  return out;
}

Blocks apply_At(const CompiledProblem& cp, const VectorXd& y) {
  Blocks out;
  for (const auto& blk : cp.blocks) {
    MatrixXd M = MatrixXd::Zero(blk.C.rows(), blk.C.cols());
    for (const auto& [i, A] : blk.A) M += y(i) * A;
    out.push_back(std::move(M));
  }
  return out;
}

// Largest alpha with M + alpha dM >= 0 (infinity if unrestricted).
double max_step(const Blocks& M, const Blocks& dM) {
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < M.size(); ++b) {
    double lmin;
    if (M[b].rows() == 1) {
      lmin = dM[b](0, 0) / M[b](0, 0);
    } else {
      Eigen::LLT<MatrixXd> llt(M[b]);
      if (llt.info() != Eigen::Success) return 0.0;
      const MatrixXd Li = llt.matrixL().solve(MatrixXd::Identity(M[b].rows(), M[b].rows()));
      const MatrixXd W = sym(Li * dM[b] * Li.transpose());
      lmin = min_eigenvalue(W);
    }
    if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

MatrixXd inverse_spd(const MatrixXd& S) {
  if (S.rows() == 1) return MatrixXd::Constant(1, 1, 1.0 / S(0, 0));
  Eigen::LLT<MatrixXd> llt(S);
  if (llt.info() == Eigen::Success) return llt.solve(MatrixXd::Identity(S.rows(), S.cols()));
  return S.completeOrthogonalDecomposition().pseudoInverse();
}

struct Certificate {
  bool valid = false;
  double radius = 0.0;
};

// Z >= 0 (LMI blocks only) gives, for every x meeting the margins,
//   0 <= sum_b tr(C_b Z_b) + r'x   with   r_k = sum_b tr(F_kb Z_b),
// so no such x exists with |x|_inf < -sum tr(C Z) / |r|_1.
Certificate radius_of(const CompiledProblem& cp, const Blocks& Z) {
  double d = 0.0;
  VectorXd r = VectorXd::Zero(cp.dof);
  for (std::size_t b = 0; b < cp.blocks.size(); ++b) {
    const auto& blk = cp.blocks[b];
    if (!blk.lmi) continue;
    d += blk.C.cwiseProduct(Z[b]).sum();
    for (const auto& [i, A] : blk.A)
      if (i < cp.dof) r(i) -= A.cwiseProduct(Z[b]).sum();
  }
  if (!(d < 0.0)) return {};
  const double l1 = r.lpNorm<1>();
  return {true, l1 > 0.0 ? -d / l1 : std::numeric_limits<double>::infinity()};
}

// Orthogonal projection of the LMI blocks of Z onto {Z : r(Z) = 0}.
class NullProjector {
 public:
  explicit NullProjector(const CompiledProblem& cp) : cp_(cp) {
    MatrixXd gram = MatrixXd::Zero(cp.dof, cp.dof);
    for (const auto& blk : cp.blocks) {
      if (!blk.lmi) continue;
      for (const auto& [i, Ai] : blk.A) {
        if (i >= cp.dof) continue;
        for (const auto& [j, Aj] : blk.A)
          if (j < cp.dof) gram(i, j) += Ai.cwiseProduct(Aj).sum();
      }
    }
    gram_ = gram.completeOrthogonalDecomposition();
  }

  Blocks operator()(const Blocks& Z) const {
    if (cp_.dof == 0) return Z;
    VectorXd r = VectorXd::Zero(cp_.dof);
    for (std::size_t b = 0; b < cp_.blocks.size(); ++b) {
      const auto& blk = cp_.blocks[b];
      if (!blk.lmi) continue;
      for (const auto& [i, Ai] : blk.A)
        if (i < cp_.dof) r(i) += Ai.cwiseProduct(Z[b]).sum();
    }
    const VectorXd lambda = gram_.solve(r);
    Blocks P = Z;
    for (std::size_t b = 0; b < cp_.blocks.size(); ++b) {
      const auto& blk = cp_.blocks[b];
      if (!blk.lmi) continue;
      for (const auto& [i, Ai] : blk.A)
        if (i < cp_.dof) P[b] -= lambda(i) * Ai;
      P[b] = sym(P[b]);
    }
    return P;
  }

 private:
  const CompiledProblem& cp_;
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> gram_;
};

// Nearest PSD matrix of rank at most k.
MatrixXd psd_truncate(const MatrixXd& A, Eigen::Index k) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(A);
  const Eigen::Index d = A.rows();
  MatrixXd out = MatrixXd::Zero(d, d);
  for (Eigen::Index i = d - 1; i >= 0 && i >= d - k; --i) {
    const double lam = es.eigenvalues()(i);
    if (lam > 0.0) out += lam * es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose();
  }
  return out;
}

// Sign of sum tr(C Z) and PSD-ness decide validity; among valid candidates
// the largest radius wins. Stops early once `needed` is reached.
void consider(const CompiledProblem& cp, const Blocks& cand, double tol, Certificate& best) {
  double d = 0.0;
  for (std::size_t b = 0; b < cp.blocks.size(); ++b) {
    if (!cp.blocks[b].lmi) continue;
    if (min_eigenvalue(cand[b]) < 0.0) return;
    d += cp.blocks[b].C.cwiseProduct(cand[b]).sum();
  }
  if (!(d < -tol * 1e-3)) return;
  const Certificate c = radius_of(cp, cand);
  if (c.valid && c.radius > best.radius) best = c;
}

Certificate check_certificate(const CompiledProblem& cp, const NullProjector& project,
                              const Blocks& X, double tol, double needed) {
  Blocks Z(X.size());
  double tau = 0.0;
  for (std::size_t b = 0; b < cp.blocks.size(); ++b) {
    if (!cp.blocks[b].lmi) continue;
    Z[b] = sym(X[b]);
    tau += Z[b].trace();
  }
  if (!(tau > 0.0)) return {};
  double d = 0.0;
  for (std::size_t b = 0; b < cp.blocks.size(); ++b) {
    if (!cp.blocks[b].lmi) continue;
    Z[b] /= tau;
    d += cp.blocks[b].C.cwiseProduct(Z[b]).sum();
  }
  Certificate best;
  consider(cp, Z, tol, best);
  // Polishing cannot fix the sign of the objective.
  if (best.radius >= needed || cp.dof == 0 || !(d < -tol * 1e-3)) return best;

  // Remove the component along the coefficient matrices, then shift each
  // block back into the cone.
  const Blocks P = project(Z);
  Blocks shifted = P;
  for (std::size_t b = 0; b < cp.blocks.size(); ++b) {
    if (!cp.blocks[b].lmi) continue;
    const double lmin = min_eigenvalue(shifted[b]);
    if (lmin < 0.0) shifted[b] -= lmin * MatrixXd::Identity(P[b].rows(), P[b].cols());
  }
  consider(cp, shifted, tol, best);
  if (best.radius >= needed) return best;

  // Certificates often lie on a low-rank face of the cone. Guess the rank of
  // each block from its spectrum and alternate between the rank-k PSD
  // matrices and the null space of the coefficient map.
  double top = 0.0;
  std::vector<VectorXd> spectra(cp.blocks.size());
  for (std::size_t b = 0; b < cp.blocks.size(); ++b) {
    if (!cp.blocks[b].lmi) continue;
    spectra[b] = Eigen::SelfAdjointEigenSolver<MatrixXd>(P[b], Eigen::EigenvaluesOnly).eigenvalues();
    top = std::max(top, spectra[b].maxCoeff());
  }
  if (!(top > 0.0)) return best;
  std::vector<Eigen::Index> previous;
  for (double theta : {1e-2, 1e-4, 1e-6}) {
    std::vector<Eigen::Index> rank(cp.blocks.size(), 0);
    for (std::size_t b = 0; b < cp.blocks.size(); ++b)
      if (cp.blocks[b].lmi) rank[b] = (spectra[b].array() > theta * top).count();
    if (rank == previous) continue;
    previous = rank;
    Blocks F = P;
    for (int sweep = 0; sweep < 20; ++sweep) {
      if (sweep > 0) F = project(F);
      for (std::size_t b = 0; b < cp.blocks.size(); ++b)
        if (cp.blocks[b].lmi) F[b] = psd_truncate(F[b], rank[b]);
    }
    consider(cp, F, tol, best);
    if (best.radius >= needed) return best;
  }
  return best;
}

struct RunOutcome {
  Status status = Status::kInconclusive;
  VectorXd x;
  int iterations = 0;
  double best_t = -std::numeric_limits<double>::infinity();
  double certificate_radius = 0.0;
  double max_abs_x = 0.0;
  std::string message;
};

bool meets_margins(const LmiProblem& problem, const std::vector<double>& margins,
                   const VectorXd& x) {
  const Assignment a = problem.unpack(x);
  for (std::size_t b = 0; b < problem.blocks().size(); ++b)
    if (min_eigenvalue(evaluate_block(problem.blocks()[b], a)) < margins[b]) return false;
  return true;
}

RunOutcome run(const LmiProblem& problem, const SolveOptions& opts, double radius) {
  const CompiledProblem cp = compile(problem, opts.epsilon, radius);
  const NullProjector project(cp);
  const double needed = required_radius(cp, radius);
  const int ny = cp.dof + 1;
  const auto nb = cp.blocks.size();
  VectorXd bvec = VectorXd::Zero(ny);
  bvec(cp.dof) = 1.0;

  int total_dim = 0;
  double max_a = 0.0;
  double max_c = 0.0;
  for (const auto& blk : cp.blocks) {
    total_dim += static_cast<int>(blk.C.rows());
    max_c = std::max(max_c, blk.C.norm());
    for (const auto& [i, A] : blk.A) max_a = std::max(max_a, A.norm());
  }
  const double x0 = std::max(10.0, std::sqrt(static_cast<double>(total_dim)) *
                                       2.0 / (1.0 + max_a));
  const double s0 = std::max(10.0, (1.0 + std::max(max_a, max_c)) /
                                       std::sqrt(static_cast<double>(total_dim)));

  Blocks X, S;
  for (const auto& blk : cp.blocks) {
    const auto d = blk.C.rows();
    X.push_back(x0 * MatrixXd::Identity(d, d));
    S.push_back(s0 * MatrixXd::Identity(d, d));
  }
  VectorXd y = VectorXd::Zero(ny);

  RunOutcome out;
  out.x = VectorXd::Zero(cp.dof);
  const double norm_c = 1.0 + max_c;

  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    out.iterations = iter;
    const VectorXd x = y.head(cp.dof);
    out.best_t = std::max(out.best_t, y(cp.dof));
    if (meets_margins(problem, cp.margins, x)) {
      out.status = Status::kFeasible;
      out.x = x;
      out.max_abs_x = x.size() ? x.lpNorm<Eigen::Infinity>() : 0.0;
      return out;
    }
    if (const auto cert = check_certificate(cp, project, X, opts.tol, needed);
        cert.valid && cert.radius >= needed) {
      out.status = Status::kInfeasible;
      out.x = x;
      out.certificate_radius = cert.radius;
      return out;
    }
    if (iter == opts.max_iter) break;

    // residuals
    const VectorXd rp = bvec - apply_A(cp, X);
    Blocks Ay = apply_At(cp, y);
    Blocks Rd(nb);
    double dinf = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      Rd[b] = cp.blocks[b].C - S[b] - Ay[b];
      dinf = std::max(dinf, Rd[b].norm());
    }
    const double mu = inner(X, S) / total_dim;
    const double pobj = [&] {
      double v = 0.0;
      for (std::size_t b = 0; b < nb; ++b) v += cp.blocks[b].C.cwiseProduct(X[b]).sum();
      return v;
    }();
    const double dobj = y(cp.dof);
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    if (gap < opts.tol && rp.norm() / (1.0 + bvec.norm()) < opts.tol && dinf / norm_c < opts.tol) {
      out.x = x;
      out.message = "converged with optimal margin " + std::to_string(dobj);
      break;
    }

    Blocks Sinv(nb);
    for (std::size_t b = 0; b < nb; ++b) Sinv[b] = inverse_spd(S[b]);

    // Schur complement M_ij = sum_b tr(A_i X A_j S^-1)
    MatrixXd M = MatrixXd::Zero(ny, ny);
    for (std::size_t b = 0; b < nb; ++b) {
      const auto& A = cp.blocks[b].A;
      std::vector<MatrixXd> P;
      P.reserve(A.size());
      for (const auto& [i, Ai] : A) P.push_back(X[b] * Ai * Sinv[b]);
      for (std::size_t p = 0; p < A.size(); ++p)
        for (std::size_t q = 0; q < A.size(); ++q)
          M(A[q].first, A[p].first) += A[q].second.cwiseProduct(P[p].transpose()).sum();
    }
    M = 0.5 * (M + M.transpose());
    Eigen::LDLT<MatrixXd> schur(M);

    Blocks XRdSinv(nb);
    for (std::size_t b = 0; b < nb; ++b) XRdSinv[b] = X[b] * Rd[b] * Sinv[b];
    const VectorXd A_XRdSinv = apply_A(cp, XRdSinv);
    const VectorXd A_Sinv = apply_A(cp, Sinv);

    auto direction = [&](double sigma_mu, const Blocks* corr, VectorXd& dy, Blocks& dX,
                         Blocks& dS) {
      VectorXd rhs = bvec - sigma_mu * A_Sinv + A_XRdSinv;
      Blocks corrSinv;
      if (corr) {
        corrSinv.resize(nb);
        for (std::size_t b = 0; b < nb; ++b) corrSinv[b] = (*corr)[b] * Sinv[b];
        rhs += apply_A(cp, corrSinv);
      }
      dy = schur.solve(rhs);
      const Blocks Ady = apply_At(cp, dy);
      dX.resize(nb);
      dS.resize(nb);
      for (std::size_t b = 0; b < nb; ++b) {
        dS[b] = Rd[b] - Ady[b];
        MatrixXd d = sigma_mu * Sinv[b] - X[b] - X[b] * dS[b] * Sinv[b];
        if (corr) d -= corrSinv[b];
        dX[b] = sym(d);
      }
    };

    VectorXd dy_a;
    Blocks dX_a, dS_a;
    direction(0.0, nullptr, dy_a, dX_a, dS_a);
    const double ap_a = std::min(1.0, max_step(X, dX_a));
    const double ad_a = std::min(1.0, max_step(S, dS_a));
    Blocks Xa(nb), Sa(nb), corr(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      Xa[b] = X[b] + ap_a * dX_a[b];
      Sa[b] = S[b] + ad_a * dS_a[b];
      corr[b] = dX_a[b] * dS_a[b];
    }
    const double mu_a = inner(Xa, Sa) / total_dim;
    const double sigma = std::clamp(std::pow(mu_a / mu, 3.0), 0.0, 1.0);

    VectorXd dy;
    Blocks dX, dS;
    direction(sigma * mu, &corr, dy, dX, dS);
    const double ap = std::min(1.0, 0.95 * max_step(X, dX));
    const double ad = std::min(1.0, 0.95 * max_step(S, dS));
    if (ap < 1e-12 && ad < 1e-12) {
      out.x = x;
      out.message = "stalled: step lengths vanished";
      break;
    }
    for (std::size_t b = 0; b < nb; ++b) {
      X[b] = sym(X[b] + ap * dX[b]);
      S[b] = sym(S[b] + ad * dS[b]);
    }
    y += ad * dy;
    out.x = y.head(cp.dof);
  }
  out.max_abs_x = out.x.size() ? out.x.lpNorm<Eigen::Infinity>() : 0.0;
  if (const auto cert = check_certificate(cp, project, X, opts.tol, needed); cert.valid) {
    out.certificate_radius = cert.radius;
    if (cert.radius >= needed) out.status = Status::kInfeasible;
  }
  if (out.message.empty() && out.status != Status::kInfeasible)
    out.message = "iteration limit reached";
  return out;
}

}  // namespace

SolveResult InteriorPointEngine::solve(const LmiProblem& problem, const SolveOptions& opts) const {
  require(opts.epsilon > 0.0, "solve_feasibility: epsilon must be positive");
  require(opts.tol > 0.0 && opts.max_iter > 0 && opts.box_radius > 0.0,
          "solve_feasibility: tol, max_iter and box_radius must be positive");
  require(!problem.blocks().empty(), "solve_feasibility: problem has no blocks");

  double radius = opts.box_radius;
  RunOutcome outcome;
  int total_iter = 0;
  for (int attempt = 0; attempt <= opts.box_retries; ++attempt) {
    outcome = run(problem, opts, radius);
    total_iter += outcome.iterations;
    if (outcome.status != Status::kInconclusive) break;
    if (outcome.max_abs_x < 0.5 * radius) break;
    radius *= 100.0;
  }

  SolveResult result;
  result.status = outcome.status;
  result.assignment = problem.unpack(outcome.x);
  result.iterations = total_iter;
  result.best_margin = outcome.best_t;
  result.certificate_radius = outcome.certificate_radius;
  result.message = outcome.message;
  for (const auto& block : problem.blocks())
    result.blocks.push_back({block.label,
                             min_eigenvalue(evaluate_block(block, result.assignment)),
                             block_margin(block, opts.epsilon)});
  return result;
}

SolveResult solve_feasibility(const LmiProblem& problem, const SolveOptions& opts) {
  return InteriorPointEngine().solve(problem, opts);
}

}  // namespace polyinf::sdp
