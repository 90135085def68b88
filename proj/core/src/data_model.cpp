#include "polyinf/data_model.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <vector>

#include "polyinf/errors.hpp"

namespace polyinf {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  // getline drops a trailing empty field
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& cell, int line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw InputError("trajectory CSV line " + std::to_string(line_no) +
                     ": cannot parse '" + cell + "' as a number");
  }
}

void require_dims(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

MatrixXd SystemPair::stacked() const {
  MatrixXd AB(A.rows(), A.cols() + B.cols());
  AB << A, B;
  return AB;
}

SystemPair SystemPair::from_stacked(const MatrixXd& AB, int n) {
  require_dims(AB.rows() == n && AB.cols() >= n,
               "from_stacked: [A B] must have n rows and at least n columns");
  return {AB.leftCols(n), AB.rightCols(AB.cols() - n)};
}

TrajectoryData::TrajectoryData(MatrixXd X, MatrixXd U_minus,
                               std::optional<MatrixXd> E_minus)
    : X_(std::move(X)), U_minus_(std::move(U_minus)), E_minus_(std::move(E_minus)) {
  if (X_.rows() < 1 || U_minus_.rows() < 1)
    throw InputError("trajectory needs at least one state and one input");
  if (U_minus_.cols() < 1) throw InputError("trajectory needs N >= 1 samples");
  if (X_.cols() != U_minus_.cols() + 1)
    throw InputError("input length must be (state length - 1): got " +
                     std::to_string(X_.cols()) + " states and " +
                     std::to_string(U_minus_.cols()) + " inputs");
  if (E_minus_ && (E_minus_->rows() != X_.rows() || E_minus_->cols() != U_minus_.cols()))
    throw InputError("noise matrix must be n x N");
}

CrossCovBounds::CrossCovBounds(MatrixXd C_l, MatrixXd C_u)
    : C_l_(std::move(C_l)), C_u_(std::move(C_u)) {
  if (C_l_.rows() != C_u_.rows() || C_l_.cols() != C_u_.cols())
    throw InputError("C_l and C_u must have the same shape");
  for (Eigen::Index i = 0; i < C_l_.rows(); ++i)
    for (Eigen::Index j = 0; j < C_l_.cols(); ++j)
      if (!(C_l_(i, j) <= C_u_(i, j)))
        throw InputError("bound entry (" + std::to_string(i) + "," +
                         std::to_string(j) + ") has C_l > C_u");
}

CrossCovBounds CrossCovBounds::symmetric(int M, int n, double c) {
  return {MatrixXd::Constant(M, n, -c), MatrixXd::Constant(M, n, c)};
}

TrajectoryData load_trajectory(std::istream& in, int n, int m) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  const auto header = split_csv(line);
  if (header.empty() || header[0] != "t")
    throw InputError("trajectory CSV header must start with 't'");

  int n_hdr = 0;
  int m_hdr = 0;
  for (std::size_t k = 1; k < header.size(); ++k) {
    const auto& h = header[k];
    const bool is_x = !h.empty() && h[0] == 'x';
    const bool is_u = !h.empty() && h[0] == 'u';
    if (is_x && m_hdr == 0) {
      ++n_hdr;
    } else if (is_u) {
      ++m_hdr;
    } else {
      throw InputError("unexpected trajectory CSV column '" + h + "'");
    }
  }
  if (n_hdr < 1 || m_hdr < 1)
    throw InputError("trajectory CSV needs x and u columns");
  if ((n > 0 && n != n_hdr) || (m > 0 && m != m_hdr))
    throw InputError("trajectory CSV header has " + std::to_string(n_hdr) +
                     " states and " + std::to_string(m_hdr) +
                     " inputs, expected " + std::to_string(n) + " and " +
                     std::to_string(m));

  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> inputs;
  bool inputs_ended = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_csv(line);
    const std::size_t width = 1 + n_hdr + m_hdr;
    if (cells.size() == 1 + static_cast<std::size_t>(n_hdr)) cells.resize(width);
    if (cells.size() != width)
      throw InputError("trajectory CSV line " + std::to_string(line_no) + ": expected " +
                       std::to_string(width) + " cells, got " +
                       std::to_string(cells.size()));
    std::vector<double> x;
    for (int i = 0; i < n_hdr; ++i) {
      if (cells[1 + i].empty())
        throw InputError("trajectory CSV line " + std::to_string(line_no) +
                         ": empty state cell");
      x.push_back(parse_number(cells[1 + i], line_no));
    }
    states.push_back(std::move(x));

    int empty = 0;
    for (int i = 0; i < m_hdr; ++i) empty += cells[1 + n_hdr + i].empty();
    if (empty == m_hdr) {
      if (inputs_ended)
        throw InputError("trajectory CSV line " + std::to_string(line_no) +
                         ": only the last row may have empty inputs");
      inputs_ended = true;
      continue;
    }
    if (empty != 0 || inputs_ended)
      throw InputError("trajectory CSV line " + std::to_string(line_no) +
                       ": input cells must all be set, except on the last row");
    std::vector<double> u;
    for (int i = 0; i < m_hdr; ++i)
      u.push_back(parse_number(cells[1 + n_hdr + i], line_no));
    inputs.push_back(std::move(u));
  }

  if (states.size() != inputs.size() + 1)
    throw InputError("input length must be (state length - 1): got " +
                     std::to_string(states.size()) + " states and " +
                     std::to_string(inputs.size()) + " inputs");
  if (inputs.empty()) throw InputError("trajectory needs N >= 1 samples");

  MatrixXd X(n_hdr, states.size());
  MatrixXd U(m_hdr, inputs.size());
  for (std::size_t t = 0; t < states.size(); ++t)
    for (int i = 0; i < n_hdr; ++i) X(i, t) = states[t][i];
  for (std::size_t t = 0; t < inputs.size(); ++t)
    for (int i = 0; i < m_hdr; ++i) U(i, t) = inputs[t][i];
  return {std::move(X), std::move(U)};
}

TrajectoryData load_trajectory(const std::string& path, int n, int m) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open trajectory file '" + path + "'");
  return load_trajectory(in, n, m);
}

void write_trajectory(std::ostream& out, const TrajectoryData& data) {
  const auto old_precision = out.precision(17);
  out << "t";
  for (int i = 0; i < data.n(); ++i) out << ",x" << i + 1;
  for (int i = 0; i < data.m(); ++i) out << ",u" << i + 1;
  out << '\n';
  for (int t = 0; t <= data.N(); ++t) {
    out << t;
    for (int i = 0; i < data.n(); ++i) out << ',' << data.X()(i, t);
    for (int i = 0; i < data.m(); ++i) {
      out << ',';
      if (t < data.N()) out << data.U_minus()(i, t);
    }
    out << '\n';
  }
  out.precision(old_precision);
}

void write_noise(std::ostream& out, const TrajectoryData& data) {
  if (!data.E_minus()) throw std::invalid_argument("write_noise: trajectory has no noise record");
  const auto old_precision = out.precision(17);
  const MatrixXd& E = *data.E_minus();
  out << "t";
  for (int i = 0; i < data.n(); ++i) out << ",e" << i + 1;
  out << '\n';
  for (int t = 0; t < data.N(); ++t) {
    out << t;
    for (int i = 0; i < data.n(); ++i) out << ',' << E(i, t);
    out << '\n';
  }
  out.precision(old_precision);
}

InstrumentSet build_lagged_instruments(const TrajectoryData& data, int M,
                                       const MatrixXd& pre_samples) {
  if (M < 1) throw std::invalid_argument("build_lagged_instruments: M must be >= 1");
  const int m = data.m();
  const int N = data.N();
  if (pre_samples.size() > 0 && pre_samples.rows() != m)
    throw std::invalid_argument("build_lagged_instruments: pre_samples must have m rows");

  // u(t) for t in [-pre, N-1]
  auto input_at = [&](int t, int channel) -> double {
    if (t >= 0) return data.U_minus()(channel, t);
    const int k = -t - 1;
    return k < pre_samples.cols() ? pre_samples(channel, k) : 0.0;
  };

  MatrixXd R(M, N);
  for (int row = 0; row < M; ++row) {
    const int lag = row / m;
    const int channel = row % m;
    for (int t = 0; t < N; ++t) R(row, t) = input_at(t - lag, channel);
  }
  return {std::move(R), "lagged_input(M=" + std::to_string(M) + ")"};
}

InstrumentSet build_explicit_instruments(const TrajectoryData& data, MatrixXd R_minus) {
  if (R_minus.rows() < 1 || R_minus.cols() != data.N())
    throw InputError("explicit instruments must have N = " + std::to_string(data.N()) +
                     " columns and at least one row");
  return {std::move(R_minus), "explicit"};
}

InstrumentSet build_instruments(const TrajectoryData& data, const InstrumentSpec& spec) {
  switch (spec.kind) {
    case InstrumentKind::kLaggedInput:
      if (spec.lags < 1) throw InputError("lagged_input instruments need lags >= 1");
      return build_lagged_instruments(data, spec.lags * data.m());
    case InstrumentKind::kExplicit:
      return build_explicit_instruments(data, spec.R_minus);
  }
  throw std::logic_error("unknown instrument kind");
}

CrossCovSummary cross_cov_summary(const TrajectoryData& data, const InstrumentSet& instr) {
  if (instr.R_minus.cols() != data.N())
    throw InputError("instrument matrix has " + std::to_string(instr.R_minus.cols()) +
                     " columns but the trajectory has N = " + std::to_string(data.N()));
  const double scale = 1.0 / std::sqrt(static_cast<double>(data.N()));
  const MatrixXd Rt = instr.R_minus.transpose();
  CrossCovSummary s;
  s.Rxr_plus = scale * data.X_plus() * Rt;
  s.Rxr_minus = scale * data.X_minus() * Rt;
  s.Rur_minus = scale * data.U_minus() * Rt;
  s.N = data.N();
  return s;
}

NoiseBoundReport check_noise_bounds(const MatrixXd& E_minus, const InstrumentSet& instr,
                                    const CrossCovBounds& bounds) {
  if (E_minus.cols() != instr.R_minus.cols())
    throw InputError("noise and instruments must have the same number of samples");
  if (bounds.instrument_count() != instr.count() || bounds.n() != E_minus.rows())
    throw InputError("bounds must be M x n = " + std::to_string(instr.count()) + " x " +
                     std::to_string(E_minus.rows()));
  const double scale = 1.0 / std::sqrt(static_cast<double>(E_minus.cols()));
  NoiseBoundReport r;
  r.sample_cross_cov = scale * instr.R_minus * E_minus.transpose();
  r.lower_slack = r.sample_cross_cov - bounds.C_l();
  r.upper_slack = bounds.C_u() - r.sample_cross_cov;
  r.holds = r.lower_slack.minCoeff() >= 0.0 && r.upper_slack.minCoeff() >= 0.0;
  return r;
}

TrajectoryData simulate(const SystemPair& system, const VectorXd& x0, const MatrixXd& U,
                        const NoiseSpec& noise) {
  const int n = system.n();
  const int m = system.m();
  require_dims(system.A.cols() == n && system.B.rows() == n, "simulate: A must be n x n, B n x m");
  require_dims(x0.size() == n, "simulate: x0 must have n entries");
  require_dims(U.rows() == m, "simulate: U must have m rows");
  if (U.cols() < 1) throw InputError("simulate: need N >= 1 input samples");
  if (noise.bound < 0.0) throw InputError("simulate: noise bound must be non-negative");
  const int N = static_cast<int>(U.cols());

  std::mt19937_64 rng(noise.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> radial(0.0, 1.0);

  MatrixXd E = MatrixXd::Zero(n, N);
  for (int t = 0; t < N; ++t) {
    switch (noise.kind) {
      case NoiseKind::kNone:
        break;
      case NoiseKind::kPerChannelUniform:
        for (int i = 0; i < n; ++i) E(i, t) = noise.bound * unit(rng);
        break;
      case NoiseKind::kUniformBall: {
        const double radius = std::sqrt(noise.bound);
        if (n == 1) {
          E(0, t) = radius * unit(rng);
          break;
        }
        VectorXd dir(n);
        for (int i = 0; i < n; ++i) dir(i) = gauss(rng);
        const double r = radius * std::pow(radial(rng), 1.0 / n);
        E.col(t) = r * dir / dir.norm();
        break;
      }
    }
  }

  MatrixXd X(n, N + 1);
  X.col(0) = x0;
  for (int t = 0; t < N; ++t)
    X.col(t + 1) = system.A * X.col(t) + system.B * U.col(t) + E.col(t);
  return {std::move(X), U, std::move(E)};
}

}  // namespace polyinf
