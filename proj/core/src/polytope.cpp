#include "polyinf/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "polyinf/errors.hpp"
#include "polyinf/lp.hpp"

namespace polyinf {

namespace {

struct Plane {
  VectorXd a;  // unit normal
  double b = 0.0;
  bool equality = false;
};

// Unit-normal planes of a row; equality windows (lo == hi) become one plane.
std::vector<Plane> planes_of(const RowPolyhedron& row, double tol) {
  std::vector<Plane> planes;
  for (int i = 0; i < row.constraint_count(); ++i) {
    const double norm = row.G.col(i).norm();
    const double lo = row.lo(i);
    const double hi = row.hi(i);
    if (norm == 0.0) {
      if ((std::isfinite(lo) && lo > tol) || (std::isfinite(hi) && hi < -tol))
        throw std::domain_error("empty row polyhedron (zero normal with excluded origin)");
      continue;
    }
    const VectorXd a = row.G.col(i) / norm;
    if (std::isfinite(lo) && std::isfinite(hi) &&
        (hi - lo) / norm <= tol * (1.0 + std::max(std::abs(lo), std::abs(hi)) / norm)) {
      planes.push_back({a, 0.5 * (lo + hi) / norm, true});
      continue;
    }
    if (std::isfinite(hi)) planes.push_back({a, hi / norm, false});
    if (std::isfinite(lo)) planes.push_back({-a, -lo / norm, false});
  }
  return planes;
}

bool satisfies(const std::vector<Plane>& planes, const VectorXd& v, double tol) {
  for (const auto& p : planes) {
    const double r = p.a.dot(v) - p.b;
    const double slack = tol * (1.0 + std::abs(p.b));
    if (r > slack || (p.equality && r < -slack)) return false;
  }
  return true;
}

void push_unique(std::vector<VectorXd>& out, const VectorXd& v, double tol) {
  for (const auto& w : out) {
    const double scale = 1.0 + std::max(v.lpNorm<Eigen::Infinity>(), w.lpNorm<Eigen::Infinity>());
    if ((v - w).lpNorm<Eigen::Infinity>() <= tol * scale) return;
  }
  out.push_back(v);
}

bool two_sided(const RowPolyhedron& row) {
  return row.lo.allFinite() && row.hi.allFinite();
}

// Recession cone {v : a_k' v <= 0} is trivial iff no coordinate LP over the
// cone capped at 1 reaches a positive value.
bool has_recession_ray(const std::vector<Plane>& planes, int d) {
  std::vector<VectorXd> normals;
  for (const auto& p : planes) {
    normals.push_back(p.a);
    if (p.equality) normals.push_back(-p.a);
  }
  const auto rows = static_cast<Eigen::Index>(normals.size());
  MatrixXd A = MatrixXd::Zero(rows + 1, d);
  for (Eigen::Index k = 0; k < rows; ++k) A.row(k) = normals[k].transpose();
  VectorXd b = VectorXd::Zero(rows + 1);
  b(rows) = 1.0;
  for (int i = 0; i < d; ++i) {
    for (double sign : {1.0, -1.0}) {
      A.row(rows).setZero();
      A(rows, i) = sign;
      VectorXd c = VectorXd::Zero(d);
      c(i) = sign;
      const auto res = lp::maximize(A, b, c);
      if (res.status == lp::LpStatus::kOptimal && res.objective > 1e-9) return true;
    }
  }
  return false;
}

void check_bounded(const RowPolyhedron& row, const std::vector<Plane>& planes) {
  const bool unbounded = two_sided(row)
                             ? classify_rank(row.G, 1e-10) == Boundedness::kUnbounded
                             : has_recession_ray(planes, row.dim());
  if (unbounded)
    throw UnsupportedError("row polyhedron " + std::to_string(row.row_index) +
                           " is unbounded");
}

std::vector<VectorXd> subset_vertices(const std::vector<Plane>& planes, int d, double tol) {
  std::vector<VectorXd> out;
  const int count = static_cast<int>(planes.size());
  if (count < d) return out;
  std::vector<int> pick(d);
  for (int i = 0; i < d; ++i) pick[i] = i;
  MatrixXd A(d, d);
  VectorXd b(d);
  while (true) {
    for (int i = 0; i < d; ++i) {
      A.row(i) = planes[pick[i]].a.transpose();
      b(i) = planes[pick[i]].b;
    }
    Eigen::FullPivLU<MatrixXd> lu(A);
    lu.setThreshold(1e-10);
    if (lu.rank() == d) {
      const VectorXd v = lu.solve(b);
      if (satisfies(planes, v, tol)) push_unique(out, v, tol);
    }
    int k = d - 1;
    while (k >= 0 && pick[k] == count - d + k) --k;
    if (k < 0) break;
    ++pick[k];
    for (int i = k + 1; i < d; ++i) pick[i] = pick[i - 1] + 1;
  }
  return out;
}

struct Ray {
  VectorXd y;
  std::vector<char> tight;  // over homogenized rows
};

std::vector<VectorXd> double_description(const std::vector<Plane>& planes, int d, double tol) {
  // Affine hull of the equality planes: v = v0 + N w.
  std::vector<const Plane*> eqs;
  for (const auto& p : planes)
    if (p.equality) eqs.push_back(&p);
  VectorXd v0 = VectorXd::Zero(d);
  MatrixXd N = MatrixXd::Identity(d, d);
  if (!eqs.empty()) {
    MatrixXd E(eqs.size(), d);
    VectorXd e(eqs.size());
    for (std::size_t k = 0; k < eqs.size(); ++k) {
      E.row(k) = eqs[k]->a.transpose();
      e(k) = eqs[k]->b;
    }
    Eigen::JacobiSVD<MatrixXd> svd(E, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(1e-10);
    const int r = static_cast<int>(svd.rank());
    v0 = svd.solve(e);
    if ((E * v0 - e).lpNorm<Eigen::Infinity>() > tol * (1.0 + e.lpNorm<Eigen::Infinity>()))
      throw std::domain_error("empty row polyhedron (inconsistent equality windows)");
    N = svd.matrixV().rightCols(d - r);
  }
  const int dw = static_cast<int>(N.cols());
  if (dw == 0) {
    if (!satisfies(planes, v0, tol)) throw std::domain_error("empty row polyhedron");
    return {v0};
  }

  // Homogenized cone {(w, s) : a' N w - (b - a' v0) s <= 0, -s <= 0}.
  std::vector<VectorXd> H;
  for (const auto& p : planes) {
    if (p.equality) continue;
    VectorXd h(dw + 1);
    h.head(dw) = N.transpose() * p.a;
    h(dw) = -(p.b - p.a.dot(v0));
    if (h.head(dw).norm() <= 1e-12) {
      if (h(dw) > tol * (1.0 + std::abs(p.b))) throw std::domain_error("empty row polyhedron");
      continue;
    }
    H.push_back(h / h.norm());
  }
  {
    VectorXd hs = VectorXd::Zero(dw + 1);
    hs(dw) = -1.0;
    H.push_back(hs);
  }
  const int rows = static_cast<int>(H.size());
  const int dim = dw + 1;

  // Initial simplicial cone from dim independent rows, s >= 0 first.
  std::vector<int> basis_rows;
  MatrixXd Q(dim, 0);
  auto try_add = [&](int k) {
    VectorXd r = H[k] - Q * (Q.transpose() * H[k]);
    if (r.norm() > 1e-9) {
      Q.conservativeResize(Eigen::NoChange, Q.cols() + 1);
      Q.col(Q.cols() - 1) = r / r.norm();
      basis_rows.push_back(k);
    }
  };
  try_add(rows - 1);
  for (int k = 0; k < rows - 1 && static_cast<int>(basis_rows.size()) < dim; ++k) try_add(k);
  if (static_cast<int>(basis_rows.size()) < dim)
    throw UnsupportedError("row polyhedron is unbounded (homogenized cone is not pointed)");

  MatrixXd AK(dim, dim);
  for (int i = 0; i < dim; ++i) AK.row(i) = H[basis_rows[i]].transpose();
  const MatrixXd inv = AK.inverse();
  std::vector<Ray> rays;
  for (int j = 0; j < dim; ++j) {
    Ray ray;
    ray.y = -inv.col(j);
    ray.y.normalize();
    ray.tight.assign(rows, 0);
    for (int i = 0; i < dim; ++i)
      if (i != j) ray.tight[basis_rows[i]] = 1;
    rays.push_back(std::move(ray));
  }

  std::vector<char> processed(rows, 0);
  for (int k : basis_rows) processed[k] = 1;
  const double zero_tol = 1e-10;

  for (int k = 0; k < rows; ++k) {
    if (processed[k]) continue;
    std::vector<double> val(rays.size());
    std::vector<int> pos, neg, zer;
    for (std::size_t r = 0; r < rays.size(); ++r) {
      val[r] = H[k].dot(rays[r].y);
      if (val[r] > zero_tol) {
        pos.push_back(static_cast<int>(r));
      } else if (val[r] < -zero_tol) {
        neg.push_back(static_cast<int>(r));
      } else {
        zer.push_back(static_cast<int>(r));
      }
    }
    processed[k] = 1;
    if (pos.empty()) {
      for (int r : zer) rays[r].tight[k] = 1;
      continue;
    }

    std::vector<Ray> next;
    for (int r : neg) next.push_back(rays[r]);
    for (int r : zer) {
      next.push_back(rays[r]);
      next.back().tight[k] = 1;
    }
    for (int p : pos) {
      for (int q : neg) {
        std::vector<char> common(rows, 0);
        int shared = 0;
        for (int i = 0; i < rows; ++i) {
          common[i] = rays[p].tight[i] && rays[q].tight[i];
          shared += common[i];
        }
        if (shared < dim - 2) continue;
        bool adjacent = true;
        for (std::size_t r = 0; r < rays.size() && adjacent; ++r) {
          if (static_cast<int>(r) == p || static_cast<int>(r) == q) continue;
          bool superset = true;
          for (int i = 0; i < rows && superset; ++i)
            if (common[i] && !rays[r].tight[i]) superset = false;
          if (superset) adjacent = false;
        }
        if (!adjacent) continue;
        Ray ray;
        ray.y = val[p] * rays[q].y - val[q] * rays[p].y;
        ray.y.normalize();
        ray.tight = common;
        ray.tight[k] = 1;
        next.push_back(std::move(ray));
      }
    }
    rays = std::move(next);
  }

  std::vector<VectorXd> out;
  for (const auto& ray : rays) {
    const double s = ray.y(dw);
    if (s <= 1e-12) continue;
    const VectorXd v = v0 + N * (ray.y.head(dw) / s);
    if (satisfies(planes, v, 10.0 * tol)) push_unique(out, v, tol);
  }
  return out;
}

}  // namespace

std::vector<VectorXd> enumerate_row_vertices(const RowPolyhedron& row, const VertexOptions& opts) {
  const int d = row.dim();
  const auto planes = planes_of(row, opts.tol);
  check_bounded(row, planes);

  VertexAlgorithm algo = opts.algorithm;
  if (algo == VertexAlgorithm::kAuto)
    algo = d <= 6 ? VertexAlgorithm::kHyperplaneSubsets : VertexAlgorithm::kDoubleDescription;
  auto vertices = algo == VertexAlgorithm::kHyperplaneSubsets
                      ? subset_vertices(planes, d, opts.tol)
                      : double_description(planes, d, opts.tol);
  if (vertices.empty())
    throw std::domain_error("row polyhedron " + std::to_string(row.row_index) + " is empty");
  std::sort(vertices.begin(), vertices.end(), [](const VectorXd& a, const VectorXd& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                        b.data() + b.size());
  });
  return vertices;
}

std::uint64_t VertexSet::count() const {
  if (per_row.empty()) return 0;
  std::uint64_t total = 1;
  for (const auto& row : per_row) {
    if (row.empty()) return 0;
    if (total > std::numeric_limits<std::uint64_t>::max() / row.size())
      throw std::overflow_error("product vertex count overflows 64 bits");
    total *= row.size();
  }
  return total;
}

MatrixXd VertexSet::stacked_at(std::uint64_t k) const {
  MatrixXd AB(n, n + m);
  for (int j = n - 1; j >= 0; --j) {
    const auto L = static_cast<std::uint64_t>(per_row[j].size());
    AB.row(j) = per_row[j][k % L].transpose();
    k /= L;
  }
  return AB;
}

SystemPair VertexSet::system_at(std::uint64_t k) const {
  return SystemPair::from_stacked(stacked_at(k), n);
}

VertexSet enumerate_vertices(const FeasibleSet& set, const VertexOptions& opts) {
  if (set.bounded != Boundedness::kBounded)
    throw UnsupportedError("vertex enumeration needs a bounded feasible set (verdict: " +
                           to_string(set.bounded) + ")");
  VertexSet vs;
  vs.n = set.n;
  vs.m = set.m;
  for (const auto& row : set.rows) vs.per_row.push_back(enumerate_row_vertices(row, opts));
  return vs;
}

MatrixXd recession_directions(const RowPolyhedron& row, double tol) {
  const int d = row.dim();
  if (row.constraint_count() == 0) return MatrixXd::Identity(d, d);
  Eigen::FullPivLU<MatrixXd> lu(row.G.transpose());
  lu.setThreshold(tol);
  if (lu.rank() == d) return MatrixXd(d, 0);
  const MatrixXd kernel = lu.kernel();
  const auto k = kernel.cols();
  Eigen::HouseholderQR<MatrixXd> qr(kernel);
  return qr.householderQ() * MatrixXd::Identity(d, k);
}

RowPolyhedron remove_redundant(const RowPolyhedron& row, double tol) {
  struct Side {
    int instrument;
    bool upper;
    VectorXd a;
    double b;
  };
  std::vector<Side> sides;
  for (int i = 0; i < row.constraint_count(); ++i) {
    if (std::isfinite(row.hi(i))) sides.push_back({i, true, row.G.col(i), row.hi(i)});
    if (std::isfinite(row.lo(i))) sides.push_back({i, false, -row.G.col(i), -row.lo(i)});
  }
  std::vector<char> active(sides.size(), 1);
  const int d = row.dim();
  for (std::size_t k = 0; k < sides.size(); ++k) {
    std::vector<int> others;
    for (std::size_t o = 0; o < sides.size(); ++o)
      if (o != k && active[o]) others.push_back(static_cast<int>(o));
    MatrixXd A(others.size(), d);
    VectorXd b(others.size());
    for (std::size_t o = 0; o < others.size(); ++o) {
      A.row(o) = sides[others[o]].a.transpose();
      b(o) = sides[others[o]].b;
    }
    const auto res = lp::maximize(A, b, sides[k].a);
    if (res.status == lp::LpStatus::kOptimal &&
        res.objective <= sides[k].b + tol * (1.0 + std::abs(sides[k].b)))
      active[k] = 0;
  }

  const double inf = std::numeric_limits<double>::infinity();
  VectorXd lo = VectorXd::Constant(row.constraint_count(), -inf);
  VectorXd hi = VectorXd::Constant(row.constraint_count(), inf);
  for (std::size_t k = 0; k < sides.size(); ++k) {
    if (!active[k]) continue;
    if (sides[k].upper) {
      hi(sides[k].instrument) = row.hi(sides[k].instrument);
    } else {
      lo(sides[k].instrument) = row.lo(sides[k].instrument);
    }
  }
  std::vector<int> kept;
  for (int i = 0; i < row.constraint_count(); ++i)
    if (std::isfinite(lo(i)) || std::isfinite(hi(i))) kept.push_back(i);

  RowPolyhedron out;
  out.row_index = row.row_index;
  out.G.resize(d, kept.size());
  out.lo.resize(kept.size());
  out.hi.resize(kept.size());
  for (std::size_t c = 0; c < kept.size(); ++c) {
    out.G.col(c) = row.G.col(kept[c]);
    out.lo(c) = lo(kept[c]);
    out.hi(c) = hi(kept[c]);
  }
  return out;
}

}  // namespace polyinf
