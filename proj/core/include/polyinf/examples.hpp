#pragma once

#include <cstdint>

#include "polyinf/data_model.hpp"

// Reference data sets used by the reproduce command and the test suites.
namespace polyinf::examples {

/// A0 = 1.5, B0 = 1.
SystemPair reference_system();

/// The four-sample scalar record with its noise E = [0.2 0.2 0.1 0.1].
TrajectoryData scalar_record();

/// Symmetric bound used with scalar_record(): c_u = -c_l = 0.25.
constexpr double kScalarRecordBound = 0.25;

/// m x N input with entries uniform on [-amplitude, amplitude].
MatrixXd random_input(int m, int N, double amplitude, std::uint64_t seed);

/// N samples of the reference system from x(0) = 0 with a random input
/// (seed) and noise uniform on {e : e^2 <= noise_sq_bound} (seed + 1).
TrajectoryData lagged_record(std::uint64_t seed, int N = 10, double noise_sq_bound = 0.2);

/// Seed for lagged_record() at which the bounds +-kLaggedRecordBound hold
/// for lagged-input instruments with M = 2..5.
constexpr std::uint64_t kLaggedRecordSeed = 50;
constexpr double kLaggedRecordBound = 0.1;

}  // namespace polyinf::examples
