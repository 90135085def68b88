#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Dense>

#include "polyinf/data_model.hpp"
#include "polyinf/feasible_set.hpp"
#include "polyinf/polytope.hpp"
#include "polyinf/synthesis.hpp"

// JSON file formats. Matrices are row-major nested arrays; readers also
// accept a bare number for a 1 x 1 matrix. Parse and shape problems throw
// InputError.
namespace polyinf::io {

/// {"M": int, "n": int, "C_l": [[...]], "C_u": [[...]]}
CrossCovBounds read_bounds(std::istream& in);
void write_bounds(std::ostream& out, const CrossCovBounds& bounds);

/// {"kind": "lagged_input", "lags": int} or {"kind": "explicit", "R_minus": [[...]]}
InstrumentSpec read_instrument_spec(std::istream& in);
void write_instrument_spec(std::ostream& out, const InstrumentSpec& spec);

/// {"n", "m", "G", "rows": [{"lo", "hi"}], "bounded"}; absent one-sided
/// constraints are written as null.
FeasibleSet read_set(std::istream& in);
void write_set(std::ostream& out, const FeasibleSet& set);

/// {"per_row": [[[...], ...], ...], "L": int}
VertexSet read_vertices(std::istream& in);
void write_vertices(std::ostream& out, const VertexSet& vs);

/// {"K", "certificates", "gamma", "status", "margins", ...}
SynthesisResult read_controller(std::istream& in);
void write_controller(std::ostream& out, const SynthesisResult& result);

/// {"C": [[...]], "D": [[...]], "gamma": float (optional)}
PerformanceSpec read_perf(std::istream& in);

/// {"A": [[...]], "B": [[...]]}
SystemPair read_system(std::istream& in);
void write_system(std::ostream& out, const SystemPair& sys);

/// Opens a file for reading; throws InputError when it cannot be opened.
std::string read_text(const std::string& path);

}  // namespace polyinf::io
