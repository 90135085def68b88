#include "polyinf/examples.hpp"

#include <random>

namespace polyinf::examples {

SystemPair reference_system() {
  return {MatrixXd::Constant(1, 1, 1.5), MatrixXd::Constant(1, 1, 1.0)};
}

TrajectoryData scalar_record() {
  MatrixXd X(1, 5);
  X << 0.0, 1.2, 3.0, 4.1, 4.25;
  MatrixXd U(1, 4);
  U << 1.0, 1.0, -0.5, -2.0;
  MatrixXd E(1, 4);
  E << 0.2, 0.2, 0.1, 0.1;
  return {X, U, E};
}

MatrixXd random_input(int m, int N, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  MatrixXd U(m, N);
  for (int t = 0; t < N; ++t)
    for (int i = 0; i < m; ++i) U(i, t) = amplitude * unit(rng);
  return U;
}

TrajectoryData lagged_record(std::uint64_t seed, int N, double noise_sq_bound) {
  const SystemPair sys = reference_system();
  const MatrixXd U = random_input(1, N, 1.0, seed);
  return simulate(sys, VectorXd::Zero(1), U, {NoiseKind::kUniformBall, noise_sq_bound, seed + 1});
}

}  // namespace polyinf::examples
