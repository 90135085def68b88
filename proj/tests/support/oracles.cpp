#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>

namespace oracle {

MatrixXd naive_cross(const MatrixXd& a, const MatrixXd& b) {
  const auto N = a.cols();
  MatrixXd out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      double s = 0.0;
      for (Eigen::Index t = 0; t < N; ++t) s += a(i, t) * b(j, t);
      out(i, j) = s / std::sqrt(static_cast<double>(N));
    }
  }
  return out;
}

std::vector<MatrixXd> full_dimension_vertices(const polyinf::FeasibleSet& set, double tol) {
  const int n = set.n;
  const int k = set.n + set.m;
  const int d = n * k;
  const MatrixXd& G = set.rows.front().G;
  const auto M = G.cols();
  // vec([A B] G) = (G' kron I_n) vec([A B]), entry (j, i) at index i * n + j.
  MatrixXd K = MatrixXd::Zero(M * n, d);
  for (Eigen::Index i = 0; i < M; ++i)
    for (Eigen::Index c = 0; c < k; ++c) K.block(i * n, c * n, n, n) = G(c, i) * MatrixXd::Identity(n, n);
  std::vector<VectorXd> normals;
  std::vector<double> rhs;
  for (Eigen::Index i = 0; i < M; ++i) {
    for (int j = 0; j < n; ++j) {
      const VectorXd row = K.row(i * n + j).transpose();
      normals.push_back(row);
      rhs.push_back(set.rows[j].hi(i));
      normals.push_back(-row);
      rhs.push_back(-set.rows[j].lo(i));
    }
  }
  const int H = static_cast<int>(normals.size());
  std::vector<MatrixXd> out;
  std::vector<int> pick(d);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == d) {
      MatrixXd S(d, d);
      VectorXd b(d);
      for (int r = 0; r < d; ++r) {
        S.row(r) = normals[pick[r]].transpose();
        b(r) = rhs[pick[r]];
      }
      Eigen::ColPivHouseholderQR<MatrixXd> qr(S);
      qr.setThreshold(1e-10);
      if (qr.rank() < d) return;
      const VectorXd x = qr.solve(b);
      for (int h = 0; h < H; ++h)
        if (normals[h].dot(x) > rhs[h] + tol * (1.0 + std::abs(rhs[h]))) return;
      MatrixXd AB(n, k);
      for (int c = 0; c < k; ++c) AB.col(c) = x.segment(c * n, n);
      for (const auto& v : out)
        if ((v - AB).cwiseAbs().maxCoeff() <= 1e-7 * (1.0 + AB.cwiseAbs().maxCoeff())) return;
      out.push_back(AB);
      return;
    }
    for (int h = start; h <= H - (d - depth); ++h) {
      pick[depth] = h;
      rec(h + 1, depth + 1);
    }
  };
  rec(0, 0);
  return out;
}

double hausdorff(const std::vector<MatrixXd>& a, const std::vector<MatrixXd>& b) {
  auto directed = [](const std::vector<MatrixXd>& x, const std::vector<MatrixXd>& y) {
    double worst = 0.0;
    for (const auto& p : x) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : y) best = std::min(best, (p - q).cwiseAbs().maxCoeff());
      worst = std::max(worst, best);
    }
    return worst;
  };
  if (a.empty() || b.empty()) return a.empty() && b.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  return std::max(directed(a, b), directed(b, a));
}

double grid_hinf(const MatrixXd& A, const MatrixXd& C, const MatrixXd& D, int points) {
  using Eigen::MatrixXcd;
  const auto n = A.rows();
  double best = 0.0;
  for (int k = 0; k <= points; ++k) {
    const double w = 3.14159265358979323846 * k / points;
    const std::complex<double> z(std::cos(w), std::sin(w));
    MatrixXcd R = -A.cast<std::complex<double>>();
    R.diagonal().array() += z;
    const MatrixXcd T = C.cast<std::complex<double>>() * R.inverse() + D.cast<std::complex<double>>();
    const Eigen::MatrixXcd TT = T.adjoint() * T;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(TT);
    best = std::max(best, std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff())));
  }
  return best;
}

double impulse_h2(const MatrixXd& A, const MatrixXd& C, const MatrixXd& D) {
  double s = D.squaredNorm();
  MatrixXd P = C;
  for (int k = 0; k < 100000; ++k) {
    const double term = P.squaredNorm();
    s += term;
    if (term < 1e-18 * (1.0 + s) && k > 10) break;
    P = P * A;
  }
  return std::sqrt(s);
}

double small_spectral_radius(const MatrixXd& A) {
  if (A.rows() == 1) return std::abs(A(0, 0));
  const double tr = A.trace();
  const double det = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
  const double disc = tr * tr / 4.0 - det;
  if (disc >= 0.0) {
    const double r = std::sqrt(disc);
    return std::max(std::abs(tr / 2.0 + r), std::abs(tr / 2.0 - r));
  }
  return std::sqrt(det);
}

double distance_to_hull(const std::vector<VectorXd>& pts, const VectorXd& p, int iters) {
  // Wolfe's minimum-norm-point method on the shifted points q_i = v_i - p.
  std::vector<VectorXd> q;
  double scale = 0.0;
  for (const VectorXd& v : pts) {
    q.push_back(v - p);
    scale = std::max(scale, q.back().squaredNorm());
  }
  std::size_t first = 0;
  for (std::size_t i = 1; i < q.size(); ++i)
    if (q[i].squaredNorm() < q[first].squaredNorm()) first = i;
  std::vector<std::size_t> active = {first};
  std::vector<double> lambda = {1.0};
  VectorXd x = q[first];
  const double tol = 1e-14 * (1.0 + scale);
  for (int major = 0; major < iters; ++major) {
    std::size_t j = 0;
    for (std::size_t i = 1; i < q.size(); ++i)
      if (q[i].dot(x) < q[j].dot(x)) j = i;
    if (x.squaredNorm() - q[j].dot(x) <= tol) break;
    if (std::find(active.begin(), active.end(), j) != active.end()) break;
    active.push_back(j);
    lambda.push_back(0.0);
    for (int minor = 0; minor < 1000; ++minor) {
      const auto k = static_cast<Eigen::Index>(active.size());
      MatrixXd sys = MatrixXd::Zero(k + 1, k + 1);
      for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index c = 0; c < k; ++c) sys(a, c) = q[active[a]].dot(q[active[c]]);
        sys(a, k) = 1.0;
        sys(k, a) = 1.0;
      }
      VectorXd rhs = VectorXd::Zero(k + 1);
      rhs(k) = 1.0;
      const VectorXd mu = sys.completeOrthogonalDecomposition().solve(rhs).head(k);
      if (mu.minCoeff() > 1e-15) {
        lambda.assign(mu.data(), mu.data() + k);
        break;
      }
      double theta = 1.0;
      for (Eigen::Index a = 0; a < k; ++a)
        if (mu(a) <= 1e-15) theta = std::min(theta, lambda[a] / (lambda[a] - mu(a)));
      std::vector<std::size_t> keep_idx;
      std::vector<double> keep_lambda;
      for (Eigen::Index a = 0; a < k; ++a) {
        const double l = lambda[a] + theta * (mu(a) - lambda[a]);
        if (l > 1e-15) {
          keep_idx.push_back(active[a]);
          keep_lambda.push_back(l);
        }
      }
      active = keep_idx;
      lambda = keep_lambda;
    }
    x = VectorXd::Zero(p.size());
    for (std::size_t a = 0; a < active.size(); ++a) x += lambda[a] * q[active[a]];
  }
  return x.norm();
}

polyinf::FeasibleSet random_bounded_set(int n, int m, int M, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> w(0.05, 1.0);
  polyinf::FeasibleSet set;
  set.n = n;
  set.m = m;
  set.bounded = polyinf::Boundedness::kBounded;
  const int k = n + m;
  MatrixXd G(k, M);
  do {
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < M; ++j) G(i, j) = u(rng);
  } while (Eigen::JacobiSVD<MatrixXd>(G).singularValues()(k - 1) < 0.1);
  for (int j = 0; j < n; ++j) {
    VectorXd v0(k);
    for (int i = 0; i < k; ++i) v0(i) = u(rng);
    polyinf::RowPolyhedron row;
    row.G = G;
    row.row_index = j;
    const VectorXd c = G.transpose() * v0;
    row.lo = c;
    row.hi = c;
    for (int i = 0; i < M; ++i) {
      row.lo(i) -= w(rng);
      row.hi(i) += w(rng);
    }
    set.rows.push_back(row);
  }
  return set;
}

}  // namespace oracle
