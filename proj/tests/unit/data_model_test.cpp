#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "polyinf/data_model.hpp"
#include "polyinf/errors.hpp"
#include "polyinf/examples.hpp"

using namespace polyinf;

namespace {

TrajectoryData scalar_data() { return examples::scalar_record(); }

}  // namespace

TEST(LoadTrajectory, ReadsScalarRecord) {
  std::istringstream in("t,x1,u1\n0,0,1\n1,1.2,1\n2,3,-0.5\n3,4.1,-2\n4,4.25,\n");
  const TrajectoryData d = load_trajectory(in, 1, 1);
  EXPECT_EQ(d.N(), 4);
  EXPECT_TRUE(d.X().isApprox(scalar_data().X()));
  EXPECT_TRUE(d.U_minus().isApprox(scalar_data().U_minus()));
}

TEST(LoadTrajectory, SmallestRecord) {
  std::istringstream in("t,x1,u1\n0,1e-1,2\n1,3.5E0,\n");
  const TrajectoryData d = load_trajectory(in);
  EXPECT_EQ(d.N(), 1);
  EXPECT_DOUBLE_EQ(d.X()(0, 0), 0.1);
  EXPECT_DOUBLE_EQ(d.X()(0, 1), 3.5);
}

TEST(LoadTrajectory, RejectsInputOnLastRow) {
  std::istringstream in("t,x1,u1\n0,0,1\n1,1,1\n2,2,1\n");
  try {
    load_trajectory(in);
    FAIL() << "expected an error";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("input length must be (state length - 1)"), std::string::npos);
  }
}

TEST(LoadTrajectory, RejectsMismatchedDimensions) {
  std::istringstream in("t,x1,x2,u1\n0,0,1,1\n1,1,1,\n");
  EXPECT_THROW(load_trajectory(in, 1, 1), InputError);
  std::istringstream bad("t,x1,u1\n0,abc,1\n1,1,\n");
  EXPECT_THROW(load_trajectory(bad), InputError);
}

TEST(LoadTrajectory, RoundTripsThroughWriter) {
  const TrajectoryData d = examples::lagged_record(3);
  std::stringstream ss;
  write_trajectory(ss, d);
  const TrajectoryData back = load_trajectory(ss);
  EXPECT_EQ((back.X() - d.X()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((back.U_minus() - d.U_minus()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(LaggedInstruments, SingleLagIsTheInput) {
  const auto d = scalar_data();
  const InstrumentSet r = build_lagged_instruments(d, 1);
  EXPECT_TRUE(r.R_minus.isApprox(d.U_minus()));
}

TEST(LaggedInstruments, ZeroPadding) {
  const InstrumentSet r = build_lagged_instruments(scalar_data(), 2);
  Eigen::RowVector4d expected(0, 1, 1, -0.5);
  EXPECT_TRUE(r.R_minus.row(1).isApprox(expected));
}

TEST(LaggedInstruments, MatchesDirectShiftFormula) {
  const TrajectoryData d = examples::lagged_record(11);
  MatrixXd pre(1, 2);
  pre << 0.3, -0.7;  // u(-1), u(-2)
  const InstrumentSet r = build_lagged_instruments(d, 3, pre);
  ASSERT_EQ(r.R_minus.rows(), 3);
  ASSERT_EQ(r.R_minus.cols(), 10);
  auto u = [&](int t) { return t >= 0 ? d.U_minus()(0, t) : pre(0, -t - 1); };
  for (int i = 0; i < 3; ++i)
    for (int t = 0; t < 10; ++t) EXPECT_EQ(r.R_minus(i, t), u(t - i)) << i << "," << t;
}

TEST(LaggedInstruments, MultiInputStacksChannelsPerLag) {
  MatrixXd X = MatrixXd::Zero(1, 4);
  MatrixXd U(2, 3);
  U << 1, 2, 3, 4, 5, 6;
  const InstrumentSet r = build_lagged_instruments(TrajectoryData(X, U), 3);
  ASSERT_EQ(r.R_minus.rows(), 3);
  EXPECT_TRUE(r.R_minus.row(0).isApprox(U.row(0)));
  EXPECT_TRUE(r.R_minus.row(1).isApprox(U.row(1)));
  Eigen::RowVector3d shifted(0, 1, 2);
  EXPECT_TRUE(r.R_minus.row(2).isApprox(shifted));
}

TEST(LaggedInstruments, RejectsNonPositiveCount) {
  EXPECT_THROW(build_lagged_instruments(scalar_data(), 0), std::invalid_argument);
}

TEST(CrossCovSummary, ScalarRecordMoments) {
  const auto d = scalar_data();
  const CrossCovSummary s = cross_cov_summary(d, build_lagged_instruments(d, 1));
  // (1/2) X_- U_-' = (0 + 1.2 - 1.5 - 8.2) / 2
  EXPECT_NEAR(s.Rxr_minus(0, 0), -4.25, 1e-12);
  EXPECT_NEAR(s.Rxr_plus(0, 0), -3.175, 1e-12);
  EXPECT_NEAR(s.Rur_minus(0, 0), 3.125, 1e-12);
}

TEST(CrossCovSummary, ZeroStates) {
  const TrajectoryData d(MatrixXd::Zero(1, 5), scalar_data().U_minus());
  const CrossCovSummary s = cross_cov_summary(d, build_lagged_instruments(d, 1));
  EXPECT_EQ(s.Rxr_minus.norm(), 0.0);
  EXPECT_EQ(s.Rxr_plus.norm(), 0.0);
}

TEST(CrossCovSummary, MatchesNaiveLoops) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2, 2);
  const int N = 17;
  MatrixXd X(2, N + 1), U(1, N), R(3, N);
  for (auto* M : {&X, &U, &R})
    for (Eigen::Index i = 0; i < M->size(); ++i) M->data()[i] = u(rng);
  const TrajectoryData d(X, U);
  const InstrumentSet instr = build_explicit_instruments(d, R);
  const CrossCovSummary s = cross_cov_summary(d, instr);
  EXPECT_LT((s.Rxr_plus - oracle::naive_cross(d.X_plus(), R)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((s.Rxr_minus - oracle::naive_cross(d.X_minus(), R)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((s.Rur_minus - oracle::naive_cross(U, R)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CrossCovSummary, RejectsWrongInstrumentLength) {
  const auto d = scalar_data();
  InstrumentSet bad{MatrixXd::Ones(1, 3), "explicit"};
  EXPECT_THROW(cross_cov_summary(d, bad), InputError);
}

TEST(NoiseBounds, ScalarRecordHolds) {
  const auto d = scalar_data();
  const auto instr = build_lagged_instruments(d, 1);
  const auto rep = check_noise_bounds(*d.E_minus(), instr, CrossCovBounds::symmetric(1, 1, 0.25));
  EXPECT_TRUE(rep.holds);
  EXPECT_NEAR(rep.sample_cross_cov(0, 0), 0.075, 1e-12);
}

TEST(NoiseBounds, TightBoundFails) {
  const auto d = scalar_data();
  const auto instr = build_lagged_instruments(d, 1);
  const auto rep = check_noise_bounds(*d.E_minus(), instr, CrossCovBounds::symmetric(1, 1, 0.01));
  EXPECT_FALSE(rep.holds);
  EXPECT_GT(rep.lower_slack(0, 0), 0.0);
  EXPECT_NEAR(rep.sample_cross_cov(0, 0), 0.075, 1e-12);
}

TEST(NoiseBounds, ZeroNoiseSlackEqualsBounds) {
  const auto d = scalar_data();
  const auto instr = build_lagged_instruments(d, 2);
  MatrixXd Cl(2, 1), Cu(2, 1);
  Cl << -0.3, 0.0;
  Cu << 0.2, 0.5;
  const auto rep = check_noise_bounds(MatrixXd::Zero(1, 4), instr, CrossCovBounds(Cl, Cu));
  EXPECT_TRUE(rep.holds);
  EXPECT_TRUE(rep.lower_slack.isApprox(-Cl));
  EXPECT_TRUE(rep.upper_slack.isApprox(Cu));
}

TEST(NoiseBounds, MonotoneInBounds) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 0.3);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto d = examples::lagged_record(seed);
    const auto instr = build_lagged_instruments(d, 3);
    const double c = u(rng);
    const bool small = check_noise_bounds(*d.E_minus(), instr, CrossCovBounds::symmetric(3, 1, c)).holds;
    const bool large =
        check_noise_bounds(*d.E_minus(), instr, CrossCovBounds::symmetric(3, 1, c + u(rng))).holds;
    EXPECT_TRUE(!small || large);
  }
}

TEST(NoiseBounds, BilinearInNoise) {
  const auto d = examples::lagged_record(4);
  const auto instr = build_lagged_instruments(d, 3);
  const auto b = CrossCovBounds::symmetric(3, 1, 1.0);
  const MatrixXd s1 = check_noise_bounds(*d.E_minus(), instr, b).sample_cross_cov;
  const MatrixXd s2 = check_noise_bounds(2.0 * *d.E_minus(), instr, b).sample_cross_cov;
  EXPECT_EQ((s2 - 2.0 * s1).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Bounds, RejectsInvertedEntry) {
  EXPECT_THROW(CrossCovBounds(MatrixXd::Constant(1, 1, 0.3), MatrixXd::Constant(1, 1, 0.2)), InputError);
}

TEST(Simulate, NoiseFreeHandIteration) {
  const MatrixXd U = scalar_data().U_minus();
  const auto d = simulate(examples::reference_system(), VectorXd::Zero(1), U, {});
  Eigen::RowVectorXd expected(5);
  expected << 0, 1, 2.5, 3.25, 2.875;
  EXPECT_TRUE(d.X().isApprox(expected));
}

TEST(Simulate, ZeroInputZeroNoise) {
  const auto d = simulate(examples::reference_system(), VectorXd::Zero(1), MatrixXd::Zero(1, 6), {});
  EXPECT_EQ(d.X().norm(), 0.0);
}

TEST(Simulate, DeterministicAndSatisfiesDataEquation) {
  const SystemPair sys{(MatrixXd(2, 2) << 0.9, 0.2, -0.1, 0.7).finished(), (MatrixXd(2, 1) << 1, 0.5).finished()};
  const MatrixXd U = examples::random_input(1, 30, 1.0, 2);
  const NoiseSpec noise{NoiseKind::kUniformBall, 0.3, 77};
  const auto a = simulate(sys, VectorXd::Ones(2), U, noise);
  const auto b = simulate(sys, VectorXd::Ones(2), U, noise);
  EXPECT_EQ((a.X() - b.X()).norm(), 0.0);
  const MatrixXd resid = a.X_plus() - sys.A * a.X_minus() - sys.B * a.U_minus() - *a.E_minus();
  EXPECT_LT(resid.cwiseAbs().maxCoeff(), 1e-13);
  for (int t = 0; t < 30; ++t) EXPECT_LE(a.E_minus()->col(t).squaredNorm(), 0.3 + 1e-15);
}

TEST(Simulate, ScalarBallIsAnInterval) {
  const auto d = examples::lagged_record(8, 200, 0.2);
  const double r = std::sqrt(0.2);
  EXPECT_LE(d.E_minus()->cwiseAbs().maxCoeff(), r);
  EXPECT_LT(d.E_minus()->minCoeff(), -0.5 * r);
  EXPECT_GT(d.E_minus()->maxCoeff(), 0.5 * r);
}
