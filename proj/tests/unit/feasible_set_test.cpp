#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "polyinf/examples.hpp"
#include "polyinf/feasible_set.hpp"
#include "polyinf/polytope.hpp"

using namespace polyinf;

namespace {

FeasibleSet scalar_set() {
  const auto d = examples::scalar_record();
  const auto s = cross_cov_summary(d, build_lagged_instruments(d, 1));
  return build_feasible_set(s, CrossCovBounds::symmetric(1, 1, examples::kScalarRecordBound));
}

FeasibleSet lagged_set(int M, std::uint64_t seed = examples::kLaggedRecordSeed) {
  const auto d = examples::lagged_record(seed);
  const auto s = cross_cov_summary(d, build_lagged_instruments(d, M));
  return build_feasible_set(s, CrossCovBounds::symmetric(M, 1, examples::kLaggedRecordBound));
}

}  // namespace

TEST(FeasibleSet, ScalarRecordStrip) {
  const FeasibleSet set = scalar_set();
  ASSERT_EQ(set.rows.size(), 1u);
  const RowPolyhedron& row = set.rows[0];
  EXPECT_EQ(set.bounded, Boundedness::kUnbounded);
  EXPECT_NEAR(row.lo(0), -3.425, 1e-12);
  EXPECT_NEAR(row.hi(0), -2.925, 1e-12);
  EXPECT_NEAR(row.G(0, 0), -4.25, 1e-12);
  EXPECT_NEAR(row.G(1, 0), 3.125, 1e-12);
}

TEST(FeasibleSet, TrueSystemIsMemberWhenBoundsHold) {
  EXPECT_TRUE(contains(scalar_set(), examples::reference_system()));
  for (int M = 2; M <= 5; ++M) EXPECT_TRUE(contains(lagged_set(M), examples::reference_system())) << M;
}

TEST(FeasibleSet, MembershipMatchesRecomputedNoise) {
  // (A, B) is in the set iff E = X+ - A X- - B U- satisfies the bounds.
  const auto d = examples::lagged_record(21);
  const auto instr = build_lagged_instruments(d, 3);
  const auto bounds = CrossCovBounds::symmetric(3, 1, 0.15);
  const FeasibleSet set = build_feasible_set(cross_cov_summary(d, instr), bounds);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 0.05);
  int agree = 0;
  for (int k = 0; k < 300; ++k) {
    SystemPair sys{MatrixXd::Constant(1, 1, 1.5 + g(rng)), MatrixXd::Constant(1, 1, 1.0 + g(rng))};
    const MatrixXd E = d.X_plus() - sys.A * d.X_minus() - sys.B * d.U_minus();
    const bool direct = check_noise_bounds(E, instr, bounds).holds;
    agree += direct == contains(set, sys, 0.0);
  }
  EXPECT_EQ(agree, 300);
}

TEST(FeasibleSet, RowsDecoupleForMultiState) {
  const SystemPair sys{(MatrixXd(2, 2) << 0.5, 0.1, 0.0, 0.8).finished(), (MatrixXd(2, 1) << 1, 1).finished()};
  const MatrixXd U = examples::random_input(1, 40, 1.0, 4);
  const auto d = simulate(sys, VectorXd::Zero(2), U, {NoiseKind::kPerChannelUniform, 0.05, 5});
  const auto s = cross_cov_summary(d, build_lagged_instruments(d, 4));
  const FeasibleSet set = build_feasible_set(s, CrossCovBounds::symmetric(4, 2, 0.2));
  ASSERT_EQ(set.rows.size(), 2u);
  EXPECT_EQ(set.rows[0].row_index, 0);
  EXPECT_EQ(set.rows[1].row_index, 1);
  EXPECT_EQ((set.rows[0].G - set.rows[1].G).norm(), 0.0);
  EXPECT_EQ(set.bounded, Boundedness::kBounded);
  EXPECT_TRUE(contains(set, sys));
}

TEST(FeasibleSet, RankClassification) {
  MatrixXd G = MatrixXd::Identity(2, 2);
  EXPECT_EQ(classify_rank(G, 1e-10), Boundedness::kBounded);
  G(1, 1) = 1e-13;
  EXPECT_EQ(classify_rank(G, 1e-10), Boundedness::kUnbounded);
  G(1, 1) = 1e-9;
  EXPECT_EQ(classify_rank(G, 1e-10), Boundedness::kUndetermined);
  EXPECT_EQ(classify_rank(MatrixXd::Ones(2, 1), 1e-10), Boundedness::kUnbounded);
}

TEST(FeasibleSet, LaggedSetsAreBoundedForMAtLeastTwo) {
  for (int M = 2; M <= 5; ++M) EXPECT_EQ(lagged_set(M).bounded, Boundedness::kBounded) << M;
}

TEST(FeasibleSet, EmptinessByLp) {
  RowPolyhedron row;
  row.G = MatrixXd::Identity(2, 2);
  row.G.conservativeResize(2, 3);
  row.G.col(2) << 1, 1;
  row.lo = VectorXd::Zero(3);
  row.hi = VectorXd::Ones(3);
  EXPECT_FALSE(is_empty(row));
  row.lo(2) = 2.5;  // v1 + v2 <= 2 from the others
  row.hi(2) = 3.0;
  EXPECT_TRUE(is_empty(row));
}

TEST(FeasibleSet, InconsistentBoundsGiveEmptySet) {
  // Tight bounds on data generated with large noise exclude every system.
  const auto d = examples::lagged_record(1, 10, 4.0);
  const auto s = cross_cov_summary(d, build_lagged_instruments(d, 5));
  MatrixXd Cl = MatrixXd::Constant(5, 1, -1e-4), Cu = MatrixXd::Constant(5, 1, 1e-4);
  const FeasibleSet set = build_feasible_set(s, CrossCovBounds(Cl, Cu));
  // Five interval constraints in two unknowns of width 2e-4 each.
  EXPECT_TRUE(is_empty(set));
}

TEST(FeasibleSet, HalfInfiniteSides) {
  RowPolyhedron row;
  row.G = MatrixXd::Identity(2, 2);
  row.lo = VectorXd::Zero(2);
  row.hi = VectorXd::Constant(2, std::numeric_limits<double>::infinity());
  EXPECT_TRUE(row.contains(VectorXd::Constant(2, 1e6), 0.0));
  EXPECT_FALSE(row.contains(VectorXd::Constant(2, -1e-3), 0.0));
  MatrixXd A;
  VectorXd b;
  row.as_inequalities(A, b);
  EXPECT_EQ(A.rows(), 2);
}
