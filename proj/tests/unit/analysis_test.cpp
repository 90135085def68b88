#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "polyinf/analysis.hpp"
#include "polyinf/examples.hpp"

using namespace polyinf;

namespace {

ClosedLoop scalar_loop(double a, double c = 1.0, double d = 0.0) {
  return {MatrixXd::Constant(1, 1, a), MatrixXd::Constant(1, 1, c), MatrixXd::Constant(1, 1, d)};
}

ClosedLoop two_state() {
  ClosedLoop cl;
  cl.A_cl = (MatrixXd(2, 2) << 0.5, 0.4, -0.3, 0.6).finished();
  cl.C = (MatrixXd(1, 2) << 1.0, -0.5).finished();
  cl.D = (MatrixXd(1, 2) << 0.1, 0.0).finished();
  return cl;
}

}  // namespace

TEST(Norms, AnalyticAnchors) {
  EXPECT_NEAR(hinf_norm(scalar_loop(0.5)), 2.0, 1e-3);
  EXPECT_NEAR(h2_norm(scalar_loop(0.0)), 1.0, 1e-6);
  EXPECT_NEAR(h2_norm(scalar_loop(0.5)), 1.1547, 1e-3);
  EXPECT_NEAR(h2_norm(scalar_loop(0.5)), 1.0 / std::sqrt(0.75), 1e-12);
}

TEST(Norms, HinfNeverExceedsGridOracleByMoreThanTolerance) {
  const ClosedLoop cl = two_state();
  const double h = hinf_norm(cl, 1e-6);
  const double g = oracle::grid_hinf(cl.A_cl, cl.C, cl.D, 20000);
  EXPECT_GE(h, g * (1 - 1e-6));
  EXPECT_LE(h, g * (1 + 1e-3));
}

TEST(Norms, NegativePoleAnchor) {
  // Peak at omega = pi: 1 / (1 - 0.8)
  EXPECT_NEAR(hinf_norm(scalar_loop(-0.8)), 5.0, 5e-4);
}

TEST(Norms, H2MatchesImpulseOracle) {
  const ClosedLoop cl = two_state();
  EXPECT_NEAR(h2_norm(cl), oracle::impulse_h2(cl.A_cl, cl.C, cl.D), 1e-9);
}

TEST(Norms, LargerSystemUsesIterativeGramian) {
  const int n = 25;
  MatrixXd A = MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) A(i, i + 1) = 0.7;
  for (int i = 0; i < n; ++i) A(i, i) = 0.2;
  ClosedLoop cl{A, MatrixXd::Ones(1, n), MatrixXd::Zero(1, n)};
  EXPECT_NEAR(h2_norm(cl), oracle::impulse_h2(A, cl.C, cl.D), 1e-7);
  const MatrixXd W = controllability_gramian(A);
  EXPECT_LT((A * W * A.transpose() - W + MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Norms, UnstableLoopThrows) {
  EXPECT_THROW(h2_norm(scalar_loop(1.2)), std::domain_error);
  EXPECT_THROW(hinf_norm(scalar_loop(-1.0)), std::domain_error);
}

TEST(Norms, SpectralRadiusMatchesCharacteristicPolynomial) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int k = 0; k < 100; ++k) {
    MatrixXd A(2, 2);
    A << u(rng), u(rng), u(rng), u(rng);
    EXPECT_NEAR(spectral_radius(A), oracle::small_spectral_radius(A), 1e-10);
  }
}

TEST(Norms, FrequencyGainAtZero) {
  EXPECT_NEAR(frequency_gain(scalar_loop(0.5, 2.0, 0.5), 0.0), 2.0 / 0.5 + 0.5, 1e-12);
}

TEST(Verify, QuadraticReportDetectsBadCertificate) {
  VertexSet vs;
  vs.n = 1;
  vs.m = 1;
  vs.per_row = {{(VectorXd(2) << 1.5, 1.0).finished(), (VectorXd(2) << 1.2, 1.0).finished()}};
  const MatrixXd K = MatrixXd::Constant(1, 1, -1.3);
  const QuadraticReport ok = verify_quadratic(K, MatrixXd::Ones(1, 1), vs, 50, 4);
  EXPECT_TRUE(ok.pass);
  EXPECT_NEAR(ok.worst_max_eig, 0.2 * 0.2 - 1.0, 1e-12);
  const QuadraticReport bad = verify_quadratic(MatrixXd::Constant(1, 1, 0.0), MatrixXd::Ones(1, 1), vs);
  EXPECT_FALSE(bad.pass);
  EXPECT_THROW(verify_quadratic(K, -MatrixXd::Ones(1, 1), vs), std::invalid_argument);
}

TEST(Verify, InclusionReport) {
  VertexSet vs;
  vs.n = 1;
  vs.m = 1;
  vs.per_row = {{(VectorXd(2) << 1.5, 1.0).finished(), (VectorXd(2) << 1.2, 1.0).finished()}};
  const MatrixXd K = MatrixXd::Constant(1, 1, -1.3);
  const InclusionReport plain = check_inclusion(vs, K, {}, 30, 9);
  EXPECT_TRUE(plain.pass);
  EXPECT_TRUE(plain.necessary_only);
  ASSERT_EQ(plain.vertex_values.size(), 2u);
  EXPECT_NEAR(plain.worst_vertex, 0.2, 1e-12);
  const MatrixXd P = MatrixXd::Ones(1, 1);
  const InclusionReport cert = check_inclusion(vs, K, {}, 30, 9, &P);
  EXPECT_FALSE(cert.necessary_only);
  // Worst vertex norm is 1 / (1 - 0.2) = 1.25.
  Criterion hinf{CriterionKind::kHinf, 1.3, MatrixXd::Ones(1, 1), MatrixXd::Zero(1, 1)};
  EXPECT_TRUE(check_inclusion(vs, K, hinf, 10, 1).pass);
  hinf.gamma = 1.2;
  EXPECT_FALSE(check_inclusion(vs, K, hinf, 10, 1).pass);
}

TEST(Verify, RandomMembersAreInTheHull) {
  VertexSet vs;
  vs.n = 1;
  vs.m = 1;
  std::vector<VectorXd> row = {(VectorXd(2) << 0, 0).finished(), (VectorXd(2) << 1, 0).finished(),
                               (VectorXd(2) << 0, 1).finished()};
  vs.per_row = {row};
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const MatrixXd p = random_member(vs, rng);
    EXPECT_LT(oracle::distance_to_hull(row, p.transpose()), 1e-9);
  }
}

TEST(Verify, HitAndRunOnUnboundedStrip) {
  RowPolyhedron strip;
  strip.G = (MatrixXd(2, 1) << -4.25, 3.125).finished();
  strip.lo = VectorXd::Constant(1, -3.425);
  strip.hi = VectorXd::Constant(1, -2.925);
  const auto pts = sample_row_members(strip, 200, 3, 50.0);
  ASSERT_EQ(pts.size(), 200u);
  for (const VectorXd& p : pts) {
    EXPECT_TRUE(strip.contains(p, 1e-9));
    EXPECT_LE(p.cwiseAbs().maxCoeff(), 50.0 + 1e-9);
  }
}
