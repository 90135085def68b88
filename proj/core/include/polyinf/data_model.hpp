#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <Eigen/Dense>

namespace polyinf {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// A linear system x(t+1) = A x(t) + B u(t) + e(t).
struct SystemPair {
  MatrixXd A;
  MatrixXd B;

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }

  /// [A B], the n x (n+m) matrix whose rows are constrained row-wise by the
  /// cross-covariance bounds.
  MatrixXd stacked() const;
  static SystemPair from_stacked(const MatrixXd& AB, int n);
};

/// Input-state data x(0..N), u(0..N-1) and, for simulated data, the noise
/// e(0..N-1) that produced it.
class TrajectoryData {
 public:
  TrajectoryData(MatrixXd X, MatrixXd U_minus,
                 std::optional<MatrixXd> E_minus = std::nullopt);

  int n() const { return static_cast<int>(X_.rows()); }
  int m() const { return static_cast<int>(U_minus_.rows()); }
  int N() const { return static_cast<int>(U_minus_.cols()); }

  const MatrixXd& X() const { return X_; }
  const MatrixXd& U_minus() const { return U_minus_; }
  const std::optional<MatrixXd>& E_minus() const { return E_minus_; }

  /// Columns 1..N of X.
  MatrixXd X_plus() const { return X_.rightCols(N()); }
  /// Columns 0..N-1 of X.
  MatrixXd X_minus() const { return X_.leftCols(N()); }

 private:
  MatrixXd X_;
  MatrixXd U_minus_;
  std::optional<MatrixXd> E_minus_;
};

enum class InstrumentKind { kLaggedInput, kExplicit };

/// How an instrument matrix came about. For lagged inputs `lags` is the
/// number of time shifts (lag 0 included); the instrument count is
/// lags * m.
struct InstrumentSpec {
  InstrumentKind kind = InstrumentKind::kLaggedInput;
  int lags = 1;
  MatrixXd R_minus;  // only for kExplicit
};

/// M x N matrix of instrumental signals; row i is [r_i(0) ... r_i(N-1)].
struct InstrumentSet {
  MatrixXd R_minus;
  std::string provenance;

  int count() const { return static_cast<int>(R_minus.rows()); }
};

/// Entrywise bounds C_l <= (1/sqrt(N)) sum_t r_i(t) e_j(t) <= C_u, both
/// M x n with entry (i, j) = (instrument, noise channel).
class CrossCovBounds {
 public:
  CrossCovBounds(MatrixXd C_l, MatrixXd C_u);

  /// c_l = -c, c_u = +c in every entry.
  static CrossCovBounds symmetric(int M, int n, double c);

  const MatrixXd& C_l() const { return C_l_; }
  const MatrixXd& C_u() const { return C_u_; }
  int instrument_count() const { return static_cast<int>(C_l_.rows()); }
  int n() const { return static_cast<int>(C_l_.cols()); }

 private:
  MatrixXd C_l_;
  MatrixXd C_u_;
};

/// Sample cross-covariances with the instruments, already scaled by
/// 1/sqrt(N).
struct CrossCovSummary {
  MatrixXd Rxr_plus;   // n x M
  MatrixXd Rxr_minus;  // n x M
  MatrixXd Rur_minus;  // m x M
  int N = 0;

  int n() const { return static_cast<int>(Rxr_plus.rows()); }
  int m() const { return static_cast<int>(Rur_minus.rows()); }
  int instrument_count() const { return static_cast<int>(Rxr_plus.cols()); }
};

struct NoiseBoundReport {
  bool holds = false;
  MatrixXd sample_cross_cov;  // M x n, (1/sqrt(N)) sum_t r_i(t) e_j(t)
  MatrixXd lower_slack;       // sample - C_l
  MatrixXd upper_slack;       // C_u - sample
};

enum class NoiseKind {
  kNone,
  /// e(t) uniform on the ball {e : |e|^2 <= bound}.
  kUniformBall,
  /// every channel independently uniform on [-bound, bound].
  kPerChannelUniform,
};

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kNone;
  double bound = 0.0;
  std::uint64_t seed = 0;
};

/// Reads the trajectory CSV (`t,x1..xn,u1..um`, input cells empty on the
/// last row). Dimensions are inferred from the header; when n or m is
/// positive it must match the header.
TrajectoryData load_trajectory(std::istream& in, int n = 0, int m = 0);
TrajectoryData load_trajectory(const std::string& path, int n = 0, int m = 0);

void write_trajectory(std::ostream& out, const TrajectoryData& data);
/// `t,e1..en` with N rows. Requires E_minus.
void write_noise(std::ostream& out, const TrajectoryData& data);

/// Lagged-input instruments r(t) = col(u(t), u(t-1), ...), all m channels
/// stacked per lag, truncated to M rows. `pre_samples` holds u(-1), u(-2),
/// ... column by column; missing columns are zero.
InstrumentSet build_lagged_instruments(const TrajectoryData& data, int M,
                                       const MatrixXd& pre_samples = {});

InstrumentSet build_explicit_instruments(const TrajectoryData& data,
                                         MatrixXd R_minus);

InstrumentSet build_instruments(const TrajectoryData& data,
                                const InstrumentSpec& spec);

CrossCovSummary cross_cov_summary(const TrajectoryData& data,
                                  const InstrumentSet& instr);

NoiseBoundReport check_noise_bounds(const MatrixXd& E_minus,
                                    const InstrumentSet& instr,
                                    const CrossCovBounds& bounds);

/// Runs x(t+1) = A x(t) + B u(t) + e(t) from x0 over the columns of U.
/// Deterministic for a given seed.
TrajectoryData simulate(const SystemPair& system, const VectorXd& x0,
                        const MatrixXd& U, const NoiseSpec& noise);

}  // namespace polyinf
