#include "polyinf/synthesis.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "polyinf/errors.hpp"

namespace polyinf {

using sdp::AffineExpr;
using sdp::BlockMatrix;
using sdp::LmiProblem;

std::string to_string(SynthStatus s) {
  switch (s) {
    case SynthStatus::kFeasible:
      return "feasible";
    case SynthStatus::kNotInformative:
      return "not_informative";
    case SynthStatus::kConditionNotMet:
      return "condition_not_met";
    case SynthStatus::kInconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

SynthStatus synth_status_from_string(const std::string& s) {
  if (s == "feasible") return SynthStatus::kFeasible;
  if (s == "not_informative") return SynthStatus::kNotInformative;
  if (s == "condition_not_met") return SynthStatus::kConditionNotMet;
  if (s == "inconclusive") return SynthStatus::kInconclusive;
  throw InputError("unknown synthesis status '" + s + "'");
}

namespace {

void require_scalar(const CrossCovSummary& s, const CrossCovBounds& b) {
  if (s.n() != 1 || s.m() != 1 || s.instrument_count() != 1 || b.n() != 1 ||
      b.instrument_count() != 1)
    throw UnsupportedError("the unbounded-set result needs n = m = 1 and a single instrument");
}

const sdp::FeasibilityEngine& engine_of(const SynthesisOptions& opts) {
  static const sdp::InteriorPointEngine default_engine;
  return opts.engine ? *opts.engine : default_engine;
}

void record_blocks(const sdp::SolveResult& r, SynthesisResult& out) {
  for (const auto& b : r.blocks) {
    out.margins[b.label] = b.min_eig;
    out.required_margins[b.label] = b.margin;
  }
  out.solver_iterations += r.iterations;
}

void require_vertices(const VertexSet& vs) {
  if (vs.per_row.empty() || vs.count() == 0)
    throw std::invalid_argument("vertex set is empty");
}

void require_perf(const VertexSet& vs, const PerformanceSpec& perf) {
  if (perf.C.rows() < 1 || perf.C.cols() != vs.n || perf.D.rows() != perf.C.rows() ||
      perf.D.cols() != vs.n)
    throw InputError("performance matrices must be C: p x n and D: p x n with p >= 1");
}

// sigma Z = A Y + B M_var for the vertex [A B].
AffineExpr vertex_times_z(const MatrixXd& AB, int n, const AffineExpr& Y, const AffineExpr& Mv) {
  const MatrixXd A = AB.leftCols(n);
  const MatrixXd B = AB.rightCols(AB.cols() - n);
  return A * Y + B * Mv;
}

MatrixXd gain_from(const MatrixXd& Y, const MatrixXd& Mv) {
  return Y.ldlt().solve(Mv.transpose()).transpose();
}

SynthesisResult from_vertex_solve(const LmiProblem& p, const sdp::SolveResult& r,
                                  const std::string& method) {
  SynthesisResult out;
  out.method = method;
  record_blocks(r, out);
  out.message = r.message;
  if (r.status == sdp::Status::kFeasible) {
    out.status = SynthStatus::kFeasible;
    const MatrixXd& Y = r.assignment[p.variable_index("Y")];
    const MatrixXd& Mv = r.assignment[p.variable_index("M")];
    out.K = gain_from(Y, Mv);
    out.certificates["Y"] = Y;
    out.certificates["M"] = Mv;
  } else if (r.status == sdp::Status::kInfeasible) {
    out.status = SynthStatus::kNotInformative;
    if (out.message.empty()) out.message = "dual certificate of infeasibility";
  } else {
    out.status = SynthStatus::kInconclusive;
  }
  return out;
}

using ProblemAt = std::function<LmiProblem(double)>;

// Fixed gamma or geometric bisection for the smallest feasible gamma.
SynthesisResult gamma_search(const ProblemAt& make, double gamma, const SynthesisOptions& opts,
                             const std::string& method,
                             const std::function<void(const LmiProblem&, const sdp::SolveResult&,
                                                      SynthesisResult&)>& extra) {
  const auto& engine = engine_of(opts);
  auto attempt = [&](double g) {
    const LmiProblem p = make(g);
    const sdp::SolveResult r = engine.solve(p, opts.solver);
    SynthesisResult out = from_vertex_solve(p, r, method);
    if (out.status == SynthStatus::kFeasible) {
      extra(p, r, out);
      out.achieved_gamma = g;
    }
    return out;
  };

  if (!opts.minimize_gamma) {
    if (!(gamma > 0.0)) throw InputError("gamma must be positive");
    return attempt(gamma);
  }
  if (!(opts.gamma_lo > 0.0 && opts.gamma_hi > opts.gamma_lo && opts.gamma_rel_tol > 0.0))
    throw InputError("gamma bracket must satisfy 0 < lo < hi and tol > 0");

  SynthesisResult best = attempt(opts.gamma_hi);
  int iterations = best.solver_iterations;
  if (best.status != SynthStatus::kFeasible) {
    best.message = "infeasible at the top of the gamma bracket; " + best.message;
    return best;
  }
  double hi = opts.gamma_hi;
  double lo = opts.gamma_lo;
  SynthesisResult at_lo = attempt(lo);
  iterations += at_lo.solver_iterations;
  if (at_lo.status == SynthStatus::kFeasible) {
    at_lo.solver_iterations = iterations;
    return at_lo;
  }
  // Inconclusive solves count as infeasible, which keeps hi feasible.
  while (hi / lo - 1.0 > opts.gamma_rel_tol) {
    const double mid = std::sqrt(lo * hi);
    SynthesisResult r = attempt(mid);
    iterations += r.solver_iterations;
    if (r.status == SynthStatus::kFeasible) {
      hi = mid;
      best = std::move(r);
    } else {
      lo = mid;
    }
  }
  best.solver_iterations = iterations;
  best.message = "smallest feasible gamma within relative " + std::to_string(opts.gamma_rel_tol);
  return best;
}

}  // namespace

ScalarData scalar_data(const CrossCovSummary& summary, const CrossCovBounds& bounds) {
  require_scalar(summary, bounds);
  return {summary.Rxr_plus(0, 0), summary.Rxr_minus(0, 0), summary.Rur_minus(0, 0),
          bounds.C_l()(0, 0), bounds.C_u()(0, 0)};
}

ScalarData scalar_data(const FeasibleSet& set) {
  if (set.n != 1 || set.m != 1 || set.rows.size() != 1 || set.instrument_count() != 1)
    throw UnsupportedError("the unbounded-set result needs n = m = 1 and a single instrument");
  const auto& row = set.rows.front();
  if (!std::isfinite(row.lo(0)) || !std::isfinite(row.hi(0)))
    throw UnsupportedError("the unbounded-set result needs both bounds of the instrument");
  // lo = Rxr_plus - c_u, hi = Rxr_plus - c_l
  return {0.0, row.G(0, 0), row.G(1, 0), -row.hi(0), -row.lo(0)};
}

SynthesisResult stabilize_scalar_unbounded(const ScalarData& d, double tol) {
  const double scale = 1.0 + std::abs(d.Rxr_plus) + std::abs(d.Rur_minus);
  if (std::abs(d.Rxr_minus) <= tol * scale)
    throw UnsupportedError(
        "instrument uncorrelated with state: Rxr_minus is zero, the boundary test does not apply");
  SynthesisResult out;
  out.method = "scalar boundary systems";
  const double a = (d.Rxr_plus - d.c_l) / d.Rxr_minus;
  const double b = (d.Rxr_plus - d.c_u) / d.Rxr_minus;
  out.boundary_values = {a, b};
  out.K = MatrixXd::Constant(1, 1, d.Rur_minus / d.Rxr_minus);
  if (std::abs(a) < 1.0 && std::abs(b) < 1.0) {
    out.status = SynthStatus::kFeasible;
  } else {
    out.status = SynthStatus::kConditionNotMet;
    out.message = "a boundary system is not stable under K = Rur / Rxr";
  }
  return out;
}

SynthesisResult stabilize_scalar_unbounded(const CrossCovSummary& summary,
                                           const CrossCovBounds& bounds) {
  return stabilize_scalar_unbounded(scalar_data(summary, bounds));
}

SynthesisResult stabilize_scalar_unbounded_lmi(const ScalarData& d, const SynthesisOptions& opts) {
  LmiProblem p;
  const AffineExpr theta = p.scalar("Theta");
  for (const auto& [label, c] : {std::pair{"lower", d.c_l}, std::pair{"upper", d.c_u}}) {
    BlockMatrix blk({1, 1});
    blk.set(0, 0, d.Rxr_minus * theta);
    blk.set(0, 1, (d.Rxr_plus - c) * theta);
    blk.set(1, 1, d.Rxr_minus * theta);
    p.add_lmi(label, blk.assemble());
  }
  const sdp::SolveResult r = engine_of(opts).solve(p, opts.solver);
  SynthesisResult out;
  out.method = "scalar Theta LMIs";
  record_blocks(r, out);
  out.message = r.message;
  out.boundary_values = {(d.Rxr_plus - d.c_l) / d.Rxr_minus, (d.Rxr_plus - d.c_u) / d.Rxr_minus};
  if (r.status == sdp::Status::kFeasible) {
    const double th = r.assignment[0](0, 0);
    out.status = SynthStatus::kFeasible;
    out.K = MatrixXd::Constant(1, 1, d.Rur_minus * th / (d.Rxr_minus * th));
    out.certificates["Theta"] = r.assignment[0];
  } else if (r.status == sdp::Status::kInfeasible) {
    out.status = SynthStatus::kConditionNotMet;
  } else {
    out.status = SynthStatus::kInconclusive;
  }
  return out;
}

LmiProblem quadratic_problem(const VertexSet& vs) {
  require_vertices(vs);
  const int n = vs.n;
  LmiProblem p;
  const AffineExpr Y = p.symmetric("Y", n);
  const AffineExpr Mv = p.rectangular("M", vs.m, n);
  for (std::uint64_t k = 0; k < vs.count(); ++k) {
    BlockMatrix blk({n, n});
    blk.set(0, 0, Y);
    blk.set(1, 0, vertex_times_z(vs.stacked_at(k), n, Y, Mv));
    blk.set(1, 1, Y);
    p.add_lmi("vertex " + std::to_string(k), blk.assemble());
  }
  return p;
}

LmiProblem hinf_problem(const VertexSet& vs, const PerformanceSpec& perf, double gamma) {
  require_vertices(vs);
  require_perf(vs, perf);
  const int n = vs.n;
  const int q = static_cast<int>(perf.C.rows());
  LmiProblem p;
  const AffineExpr Y = p.symmetric("Y", n);
  const AffineExpr Mv = p.rectangular("M", vs.m, n);
  const MatrixXd In = MatrixXd::Identity(n, n);
  for (std::uint64_t k = 0; k < vs.count(); ++k) {
    BlockMatrix blk({n, n, n, q});
    blk.set(0, 0, Y);
    blk.set(1, 1, MatrixXd(gamma * In));
    blk.set(2, 0, vertex_times_z(vs.stacked_at(k), n, Y, Mv));
    blk.set(2, 1, In);
    blk.set(2, 2, Y);
    blk.set(3, 0, perf.C * Y);
    blk.set(3, 1, perf.D);
    blk.set(3, 3, MatrixXd(gamma * MatrixXd::Identity(q, q)));
    p.add_lmi("vertex " + std::to_string(k), blk.assemble());
  }
  return p;
}

LmiProblem h2_problem(const VertexSet& vs, const PerformanceSpec& perf, double gamma) {
  require_vertices(vs);
  require_perf(vs, perf);
  const int n = vs.n;
  const int q = static_cast<int>(perf.C.rows());
  LmiProblem p;
  const AffineExpr Y = p.symmetric("Y", n);
  const AffineExpr Mv = p.rectangular("M", vs.m, n);
  const AffineExpr P = p.symmetric("P", q);
  const MatrixXd In = MatrixXd::Identity(n, n);

  BlockMatrix out({n, n, q});
  out.set(0, 0, Y);
  out.set(1, 1, In);
  out.set(2, 0, perf.C * Y);
  out.set(2, 1, perf.D);
  out.set(2, 2, P);
  p.add_lmi("output", out.assemble());
  p.add_lmi("trace", AffineExpr(MatrixXd::Constant(1, 1, gamma)) - sdp::trace(P));

  for (std::uint64_t k = 0; k < vs.count(); ++k) {
    BlockMatrix blk({n, n, n});
    blk.set(0, 0, Y);
    blk.set(1, 0, vertex_times_z(vs.stacked_at(k), n, Y, Mv).transpose());
    blk.set(1, 1, Y);
    blk.set(2, 0, In);
    blk.set(2, 2, MatrixXd(gamma * In));
    p.add_lmi("vertex " + std::to_string(k), blk.assemble());
  }
  return p;
}

SynthesisResult stabilize_quadratic(const VertexSet& vs, const SynthesisOptions& opts) {
  const LmiProblem p = quadratic_problem(vs);
  SynthesisResult out =
      from_vertex_solve(p, engine_of(opts).solve(p, opts.solver), "vertex LMIs (quadratic)");
  out.vertex_count = vs.count();
  // Y itself satisfies (A+BK) Y (A+BK)' - Y < 0 at every vertex.
  if (out.status == SynthStatus::kFeasible) out.certificates["P"] = out.certificates["Y"];
  return out;
}

SynthesisResult synth_hinf(const VertexSet& vs, const PerformanceSpec& perf,
                           const SynthesisOptions& opts) {
  SynthesisResult out = gamma_search(
      [&](double g) { return hinf_problem(vs, perf, g); }, perf.gamma, opts, "vertex LMIs (Hinf)",
      [](const LmiProblem&, const sdp::SolveResult&, SynthesisResult&) {});
  out.vertex_count = vs.count();
  return out;
}

SynthesisResult synth_h2(const VertexSet& vs, const PerformanceSpec& perf,
                         const SynthesisOptions& opts) {
  SynthesisResult out = gamma_search(
      [&](double g) { return h2_problem(vs, perf, g); }, perf.gamma, opts, "vertex LMIs (H2)",
      [](const LmiProblem& p, const sdp::SolveResult& r, SynthesisResult& res) {
        res.certificates["P"] = r.assignment[p.variable_index("P")];
      });
  out.vertex_count = vs.count();
  return out;
}

SynthesisResult synthesize(const FeasibleSet& set, Objective objective,
                           const PerformanceSpec* perf, const SynthesisOptions& opts,
                           const VertexOptions& vertex_opts) {
  if (is_empty(set)) throw std::domain_error("the feasible set is empty");
  if (set.bounded == Boundedness::kUndetermined)
    throw UnsupportedError("boundedness is undetermined at the rank tolerance");
  if (set.bounded == Boundedness::kUnbounded) {
    if (objective != Objective::kStabilize)
      throw UnsupportedError("performance synthesis needs a bounded feasible set");
    return stabilize_scalar_unbounded(scalar_data(set));
  }
  const VertexSet vs = enumerate_vertices(set, vertex_opts);
  if (objective == Objective::kStabilize) return stabilize_quadratic(vs, opts);
  if (!perf) throw InputError("a performance specification is required");
  return objective == Objective::kHinf ? synth_hinf(vs, *perf, opts) : synth_h2(vs, *perf, opts);
}

}  // namespace polyinf
