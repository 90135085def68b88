#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "polyinf/data_model.hpp"
#include "polyinf/feasible_set.hpp"
#include "polyinf/polytope.hpp"

namespace polyinf {

/// x(t+1) = A_cl x(t) + w(t),  z(t) = C x(t) + D w(t).
struct ClosedLoop {
  MatrixXd A_cl;
  MatrixXd C;
  MatrixXd D;

  static ClosedLoop from(const SystemPair& sys, const MatrixXd& K, const MatrixXd& C,
                         const MatrixXd& D);
};

double spectral_radius(const MatrixXd& A);

/// W with A W A' - W + I = 0. Requires spectral_radius(A) < 1.
MatrixXd controllability_gramian(const MatrixXd& A);

double h2_norm(const ClosedLoop& cl);

/// Largest singular value of C (e^{i w} I - A)^-1 + D.
double frequency_gain(const ClosedLoop& cl, double omega);

/// Certified H-infinity norm to relative accuracy tol. The returned value
/// never exceeds the true norm: a frequency sweep supplies the lower end and
/// a bounded-real LMI confirms the upper end.
double hinf_norm(const ClosedLoop& cl, double tol = 1e-4);

struct QuadraticReport {
  bool pass = false;
  /// Largest eigenvalue of A_cl P A_cl' - P over vertices and samples.
  double worst_max_eig = 0.0;
  std::vector<double> vertex_max_eig;
  double worst_sample_max_eig = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  /// The inequality that was checked.
  std::string certified;
};

/// Checks A_cl P A_cl' - P < 0 at every product vertex and at random points
/// of the set. With P = Y from the vertex LMIs this is exactly the Schur
/// complement of each block.
QuadraticReport verify_quadratic(const MatrixXd& K, const MatrixXd& P, const VertexSet& vertices,
                                 int samples = 100, std::uint64_t seed = 0);

enum class CriterionKind { kStability, kHinf, kH2 };

struct Criterion {
  CriterionKind kind = CriterionKind::kStability;
  double gamma = 0.0;
  MatrixXd C;
  MatrixXd D;
};

struct InclusionReport {
  bool pass = false;
  /// True when only pointwise checks were made; vertex and sample checks
  /// are necessary conditions for inclusion but not sufficient.
  bool necessary_only = true;
  /// Spectral radius (stability) or norm (hinf, h2) per product vertex.
  std::vector<double> vertex_values;
  double worst_vertex = 0.0;
  double worst_sample = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  std::optional<QuadraticReport> certificate;
  std::string note;
};

/// Evaluates the criterion at all product vertices and at random members.
/// A certificate P (checked with verify_quadratic) upgrades a stability pass
/// to a set-wide statement.
InclusionReport check_inclusion(const VertexSet& vertices, const MatrixXd& K,
                                const Criterion& criterion, int samples = 100,
                                std::uint64_t seed = 0, const MatrixXd* certificate = nullptr);

/// A random point of the set: row j is a random convex combination of the
/// vertices of row j.
MatrixXd random_member(const VertexSet& vertices, std::mt19937_64& rng);

/// Hit-and-run samples of a row polyhedron, started at its Chebyshev center.
/// Unbounded rows need a finite box |v|_inf <= box.
std::vector<VectorXd> sample_row_members(const RowPolyhedron& row, int count, std::uint64_t seed,
                                         double box = std::numeric_limits<double>::infinity(),
                                         int thinning = 5);

}  // namespace polyinf
