#include "polyinf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "polyinf/errors.hpp"
#include "polyinf/lp.hpp"
#include "polyinf/sdp.hpp"

namespace polyinf {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_stable(const MatrixXd& A) {
  if (!(spectral_radius(A) < 1.0)) throw std::domain_error("closed loop is not stable");
}

double max_eig_sym(const MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

// Bounded-real test: P > 0 with
//   [A'PA - P + C'C, A'P + C'D; PA + D'C, P + D'D - g^2 I] < 0.
sdp::Status bounded_real(const ClosedLoop& cl, double gamma) {
  const int n = static_cast<int>(cl.A_cl.rows());
  sdp::LmiProblem p;
  const sdp::AffineExpr P = p.symmetric("P", n);
  const MatrixXd& A = cl.A_cl;
  sdp::BlockMatrix blk({n, n});
  blk.set(0, 0, A.transpose() * P * A - P + MatrixXd(cl.C.transpose() * cl.C));
  blk.set(1, 0, P * A + MatrixXd(cl.D.transpose() * cl.C));
  blk.set(1, 1, P + MatrixXd(cl.D.transpose() * cl.D - gamma * gamma * MatrixXd::Identity(n, n)));
  p.add_lmi("P", P);
  p.add_lmi("bounded real", blk.assemble(), sdp::Sense::kNegativeDefinite);
  return sdp::solve_feasibility(p).status;
}

double pointwise_value(const SystemPair& sys, const MatrixXd& K, const Criterion& c) {
  const MatrixXd A_cl = sys.A + sys.B * K;
  const double rho = spectral_radius(A_cl);
  if (c.kind == CriterionKind::kStability) return rho;
  if (!(rho < 1.0)) return std::numeric_limits<double>::infinity();
  const ClosedLoop cl{A_cl, c.C, c.D};
  return c.kind == CriterionKind::kHinf ? hinf_norm(cl) : h2_norm(cl);
}

}  // namespace

ClosedLoop ClosedLoop::from(const SystemPair& sys, const MatrixXd& K, const MatrixXd& C,
                            const MatrixXd& D) {
  if (K.rows() != sys.m() || K.cols() != sys.n())
    throw std::invalid_argument("gain must be m x n");
  if (C.cols() != sys.n() || D.rows() != C.rows() || D.cols() != sys.n())
    throw std::invalid_argument("C and D must be p x n");
  return {sys.A + sys.B * K, C, D};
}

double spectral_radius(const MatrixXd& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("spectral_radius: matrix must be square");
  if (A.rows() == 0) return 0.0;
  Eigen::EigenSolver<MatrixXd> es(A, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

MatrixXd controllability_gramian(const MatrixXd& A) {
  require_stable(A);
  const auto n = A.rows();
  if (n <= 20) {
    // (I - A kron A) vec(W) = vec(I)
    const auto n2 = n * n;
    MatrixXd L = MatrixXd::Identity(n2, n2);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index l = 0; l < n; ++l)
        L.block(j * n, l * n, n, n) -= A(j, l) * A;
    const MatrixXd I = MatrixXd::Identity(n, n);
    const VectorXd w = L.partialPivLu().solve(Eigen::Map<const VectorXd>(I.data(), n2));
    const MatrixXd W = Eigen::Map<const MatrixXd>(w.data(), n, n);
    return 0.5 * (W + W.transpose());
  }
  // Squared Smith iteration: W_{k+1} = W_k + A_k W_k A_k', A_{k+1} = A_k^2.
  MatrixXd W = MatrixXd::Identity(n, n);
  MatrixXd Ak = A;
  for (int k = 0; k < 64; ++k) {
    const MatrixXd step = Ak * W * Ak.transpose();
    W += step;
    Ak = Ak * Ak;
    if (step.norm() <= 1e-14 * W.norm()) break;
  }
  return 0.5 * (W + W.transpose());
}

double h2_norm(const ClosedLoop& cl) {
  const MatrixXd W = controllability_gramian(cl.A_cl);
  const double sq = (cl.C * W * cl.C.transpose()).trace() + (cl.D * cl.D.transpose()).trace();
  return std::sqrt(std::max(sq, 0.0));
}

double frequency_gain(const ClosedLoop& cl, double omega) {
  using Eigen::MatrixXcd;
  const auto n = cl.A_cl.rows();
  const std::complex<double> z = std::polar(1.0, omega);
  const MatrixXcd R = z * MatrixXcd::Identity(n, n) - cl.A_cl.cast<std::complex<double>>();
  const MatrixXcd G = cl.C.cast<std::complex<double>>() * R.partialPivLu().solve(MatrixXcd::Identity(n, n)) +
                      cl.D.cast<std::complex<double>>();
  if (G.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixXcd> svd(G);
  return svd.singularValues()(0);
}

double hinf_norm(const ClosedLoop& cl, double tol) {
  require_stable(cl.A_cl);
  if (!(tol > 0.0)) throw std::invalid_argument("hinf_norm: tol must be positive");

  // Frequency sweep on [0, pi] including the pole angles, then golden-section
  // refinement around each local maximum.
  std::vector<double> grid;
  const int points = 2048;
  for (int i = 0; i <= points; ++i) grid.push_back(kPi * i / points);
  Eigen::EigenSolver<MatrixXd> es(cl.A_cl, false);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    grid.push_back(std::abs(std::arg(es.eigenvalues()(i))));
  std::sort(grid.begin(), grid.end());
  std::vector<double> gain(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) gain[i] = frequency_gain(cl, grid[i]);

  double lb = *std::max_element(gain.begin(), gain.end());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const bool peak = (i == 0 || gain[i] >= gain[i - 1]) &&
                      (i + 1 == grid.size() || gain[i] >= gain[i + 1]);
    if (!peak || gain[i] < 0.5 * lb) continue;
    double a = grid[i == 0 ? 0 : i - 1];
    double b = grid[i + 1 == grid.size() ? i : i + 1];
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - r * (b - a);
    double x2 = a + r * (b - a);
    double f1 = frequency_gain(cl, x1);
    double f2 = frequency_gain(cl, x2);
    for (int it = 0; it < 60 && b - a > 1e-13; ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + r * (b - a);
        f2 = frequency_gain(cl, x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - r * (b - a);
        f1 = frequency_gain(cl, x1);
      }
    }
    lb = std::max({lb, f1, f2});
  }
  if (lb <= 0.0) return 0.0;

  double hi = lb * (1.0 + tol);
  if (bounded_real(cl, hi) == sdp::Status::kFeasible) return lb;

  // The sweep missed the peak: bracket and bisect. Inconclusive solves are
  // treated as infeasible so the upper end stays certified.
  double lo = hi;
  for (int k = 0; k < 60; ++k) {
    hi *= 2.0;
    if (bounded_real(cl, hi) == sdp::Status::kFeasible) break;
    lo = hi;
  }
  while (hi / lo - 1.0 > tol) {
    const double mid = std::sqrt(lo * hi);
    if (bounded_real(cl, mid) == sdp::Status::kFeasible) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return lo;
}

MatrixXd random_member(const VertexSet& vs, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  MatrixXd AB(vs.n, vs.n + vs.m);
  for (int j = 0; j < vs.n; ++j) {
    const auto& verts = vs.per_row[j];
    VectorXd row = VectorXd::Zero(vs.n + vs.m);
    double total = 0.0;
    for (const auto& v : verts) {
      const double w = expo(rng);
      row += w * v;
      total += w;
    }
    AB.row(j) = (row / total).transpose();
  }
  return AB;
}

QuadraticReport verify_quadratic(const MatrixXd& K, const MatrixXd& P, const VertexSet& vs,
                                 int samples, std::uint64_t seed) {
  if (P.rows() != vs.n || P.cols() != vs.n) throw std::invalid_argument("P must be n x n");
  if (!P.isApprox(P.transpose(), 1e-12) || Eigen::LLT<MatrixXd>(P).info() != Eigen::Success)
    throw std::invalid_argument("P is not symmetric positive definite");
  QuadraticReport rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.certified = "(A+BK) P (A+BK)' - P < 0";
  auto value = [&](const MatrixXd& AB) {
    const SystemPair sys = SystemPair::from_stacked(AB, vs.n);
    const MatrixXd A_cl = sys.A + sys.B * K;
    return max_eig_sym(A_cl * P * A_cl.transpose() - P);
  };
  rep.worst_max_eig = -std::numeric_limits<double>::infinity();
  for (std::uint64_t k = 0; k < vs.count(); ++k) {
    rep.vertex_max_eig.push_back(value(vs.stacked_at(k)));
    rep.worst_max_eig = std::max(rep.worst_max_eig, rep.vertex_max_eig.back());
  }
  std::mt19937_64 rng(seed);
  rep.worst_sample_max_eig = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s)
    rep.worst_sample_max_eig = std::max(rep.worst_sample_max_eig, value(random_member(vs, rng)));
  rep.worst_max_eig = std::max(rep.worst_max_eig, rep.worst_sample_max_eig);
  rep.pass = rep.worst_max_eig < 0.0;
  return rep;
}

InclusionReport check_inclusion(const VertexSet& vs, const MatrixXd& K, const Criterion& c,
                                int samples, std::uint64_t seed, const MatrixXd* certificate) {
  if (c.kind != CriterionKind::kStability && !(c.gamma > 0.0))
    throw std::invalid_argument("performance criteria need gamma > 0");
  InclusionReport rep;
  rep.samples = samples;
  rep.seed = seed;
  const double limit =
      c.kind == CriterionKind::kStability ? 1.0 : c.gamma * (1.0 + 1e-6);
  rep.worst_vertex = 0.0;
  for (const SystemPair& sys : product_vertices(vs)) {
    rep.vertex_values.push_back(pointwise_value(sys, K, c));
    rep.worst_vertex = std::max(rep.worst_vertex, rep.vertex_values.back());
  }
  std::mt19937_64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    const SystemPair sys = SystemPair::from_stacked(random_member(vs, rng), vs.n);
    rep.worst_sample = std::max(rep.worst_sample, pointwise_value(sys, K, c));
  }
  const bool pointwise = c.kind == CriterionKind::kStability
                             ? rep.worst_vertex < limit && rep.worst_sample < limit
                             : rep.worst_vertex <= limit && rep.worst_sample <= limit;
  rep.pass = pointwise;
  if (certificate && c.kind == CriterionKind::kStability) {
    rep.certificate = verify_quadratic(K, *certificate, vs, samples, seed);
    rep.necessary_only = !rep.certificate->pass;
    rep.pass = pointwise && rep.certificate->pass;
    rep.note = rep.certificate->pass
                   ? "common quadratic certificate holds at every vertex, so it holds on the set"
                   : "quadratic certificate fails";
  } else {
    rep.necessary_only = true;
    rep.note = "vertex and sample checks only; necessary for inclusion, not sufficient";
  }
  return rep;
}

std::vector<VectorXd> sample_row_members(const RowPolyhedron& row, int count, std::uint64_t seed,
                                         double box, int thinning) {
  if (count < 0 || thinning < 1) throw std::invalid_argument("count >= 0 and thinning >= 1");
  MatrixXd A;
  VectorXd b;
  row.as_inequalities(A, b);
  const int d = row.dim();
  if (std::isfinite(box)) {
    const auto k = A.rows();
    A.conservativeResize(k + 2 * d, d);
    b.conservativeResize(k + 2 * d);
    A.bottomRows(2 * d) << MatrixXd::Identity(d, d), -MatrixXd::Identity(d, d);
    b.tail(2 * d).setConstant(box);
  }
  // Chebyshev center: max r  s.t.  a_i'v + |a_i| r <= b_i,  r <= 1.
  MatrixXd Ac(A.rows() + 1, d + 1);
  VectorXd bc(A.rows() + 1);
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    Ac.row(i) << A.row(i), A.row(i).norm();
    bc(i) = b(i);
  }
  Ac.row(A.rows()).setZero();
  Ac(A.rows(), d) = 1.0;
  bc(A.rows()) = 1.0;
  VectorXd obj = VectorXd::Zero(d + 1);
  obj(d) = 1.0;
  const lp::LpResult center = lp::maximize(Ac, bc, obj);
  if (center.status == lp::LpStatus::kInfeasible) throw std::domain_error("row polyhedron is empty");
  if (center.status == lp::LpStatus::kUnbounded || center.x(d) <= 0.0)
    throw std::domain_error("row polyhedron has no interior");
  VectorXd v = center.x.head(d);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto step = [&] {
    VectorXd dir(d);
    for (int i = 0; i < d; ++i) dir(i) = normal(rng);
    dir.normalize();
    const VectorXd Ad = A * dir;
    const VectorXd slack = b - A * v;
    double tmin = -std::numeric_limits<double>::infinity();
    double tmax = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      if (Ad(i) > 1e-14) tmax = std::min(tmax, std::max(slack(i), 0.0) / Ad(i));
      if (Ad(i) < -1e-14) tmin = std::max(tmin, -std::max(slack(i), 0.0) / -Ad(i));
    }
    if (!std::isfinite(tmin) || !std::isfinite(tmax))
      throw UnsupportedError("row polyhedron is unbounded; pass a finite box");
    v += (tmin + unit(rng) * (tmax - tmin)) * dir;
  };
  for (int i = 0; i < 20 * d; ++i) step();
  std::vector<VectorXd> out;
  out.reserve(count);
  for (int s = 0; s < count; ++s) {
    for (int t = 0; t < thinning; ++t) step();
    out.push_back(v);
  }
  return out;
}

}  // namespace polyinf
