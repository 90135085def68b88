#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "polyinf/data_model.hpp"
#include "polyinf/feasible_set.hpp"
#include "polyinf/polytope.hpp"
#include "polyinf/sdp.hpp"

namespace polyinf {

enum class PerfKind { kHinf, kH2 };

/// Performance channel of the closed loop
///   x(t+1) = (A + BK) x(t) + w(t),   z(t) = C x(t) + D w(t).
struct PerformanceSpec {
  MatrixXd C;  // p x n
  MatrixXd D;  // p x n
  double gamma = 1.0;
  PerfKind kind = PerfKind::kHinf;
};

enum class SynthStatus {
  kFeasible,
  /// An if-and-only-if condition failed: no gain works for the whole set.
  kNotInformative,
  /// A sufficient condition failed; informativity is not decided.
  kConditionNotMet,
  kInconclusive,
};

std::string to_string(SynthStatus s);
SynthStatus synth_status_from_string(const std::string& s);

struct SynthesisResult {
  SynthStatus status = SynthStatus::kInconclusive;
  MatrixXd K;
  /// Y, M, P or Theta depending on the method.
  std::map<std::string, MatrixXd> certificates;
  std::optional<double> achieved_gamma;
  /// Minimum eigenvalue of every LMI block at the returned point.
  std::map<std::string, double> margins;
  /// Required margin epsilon * (1 + |constant|) of every block.
  std::map<std::string, double> required_margins;
  /// Boundary closed-loop values of the scalar test.
  std::vector<double> boundary_values;
  std::uint64_t vertex_count = 0;
  int solver_iterations = 0;
  std::string method;
  std::string message;
};

struct SynthesisOptions {
  sdp::SolveOptions solver;
  /// Engine used for every LMI; the built-in interior-point method if null.
  const sdp::FeasibilityEngine* engine = nullptr;
  bool minimize_gamma = false;
  double gamma_lo = 1e-6;
  double gamma_hi = 1e6;
  double gamma_rel_tol = 1e-3;
};

/// Scalar quantities of the unbounded case n = m = 1, M = 1.
struct ScalarData {
  double Rxr_plus = 0.0;
  double Rxr_minus = 0.0;
  double Rur_minus = 0.0;
  double c_l = 0.0;
  double c_u = 0.0;
};

ScalarData scalar_data(const CrossCovSummary& summary, const CrossCovBounds& bounds);
/// From a stored set; only the differences Rxr_plus - c enter, so Rxr_plus
/// is set to zero.
ScalarData scalar_data(const FeasibleSet& set);

/// Both boundary systems of the scalar set are stable under
/// K = Rur / Rxr. Sufficient only.
SynthesisResult stabilize_scalar_unbounded(const ScalarData& d, double tol = 1e-12);
SynthesisResult stabilize_scalar_unbounded(const CrossCovSummary& summary,
                                           const CrossCovBounds& bounds);

/// The two Theta-LMIs; K = Rur Theta (Rxr Theta)^-1.
SynthesisResult stabilize_scalar_unbounded_lmi(const ScalarData& d,
                                               const SynthesisOptions& opts = {});

/// One LMI [[Y, (AY+BM)'], [AY+BM, Y]] > 0 per product vertex; K = M Y^-1.
SynthesisResult stabilize_quadratic(const VertexSet& vertices, const SynthesisOptions& opts = {});

SynthesisResult synth_hinf(const VertexSet& vertices, const PerformanceSpec& perf,
                           const SynthesisOptions& opts = {});
/// The certificate bounds the H2 norm squared by gamma^2 - (gamma - 1) tr(D D'),
/// so the level gamma is guaranteed when D = 0 or gamma >= 1.
SynthesisResult synth_h2(const VertexSet& vertices, const PerformanceSpec& perf,
                         const SynthesisOptions& opts = {});

/// The LMI systems themselves, for inspection and independent re-checking.
sdp::LmiProblem quadratic_problem(const VertexSet& vertices);
sdp::LmiProblem hinf_problem(const VertexSet& vertices, const PerformanceSpec& perf, double gamma);
sdp::LmiProblem h2_problem(const VertexSet& vertices, const PerformanceSpec& perf, double gamma);

enum class Objective { kStabilize, kHinf, kH2 };

/// Picks the scalar path for unbounded sets and the vertex LMIs for bounded
/// ones. Throws UnsupportedError for combinations without a result.
SynthesisResult synthesize(const FeasibleSet& set, Objective objective,
                           const PerformanceSpec* perf = nullptr,
                           const SynthesisOptions& opts = {},
                           const VertexOptions& vertex_opts = {});

}  // namespace polyinf
