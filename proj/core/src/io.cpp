#include "polyinf/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "polyinf/errors.hpp"

namespace polyinf::io {

using nlohmann::json;

namespace {

json parse(std::istream& in) {
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw InputError(what + " must be a number");
  return j.get<double>();
}

MatrixXd matrix(const json& j, const std::string& what) {
  if (j.is_number()) return MatrixXd::Constant(1, 1, j.get<double>());
  if (!j.is_array()) throw InputError(what + " must be a nested array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return MatrixXd();
  const auto cols = static_cast<Eigen::Index>(j.front().is_array() ? j.front().size() : 0);
  MatrixXd M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw InputError(what + ": row " + std::to_string(r) + " has the wrong length");
    for (Eigen::Index c = 0; c < cols; ++c)
      M(r, c) = number(row[c], what + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  }
  return M;
}

VectorXd vector_with_nulls(const json& j, double null_value, const std::string& what) {
  if (!j.is_array()) throw InputError(what + " must be an array");
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v(i) = j[i].is_null() ? null_value : number(j[i], what);
  return v;
}

json to_json(const MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(row);
  }
  return rows;
}

json to_json_vector(const VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::isfinite(v(i))) {
      out.push_back(v(i));
    } else {
      out.push_back(nullptr);
    }
  }
  return out;
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

}  // namespace

CrossCovBounds read_bounds(std::istream& in) {
  const json j = parse(in);
  const MatrixXd C_l = matrix(field(j, "C_l"), "C_l");
  const MatrixXd C_u = matrix(field(j, "C_u"), "C_u");
  if (j.contains("M") && j["M"].get<long>() != C_l.rows())
    throw InputError("bounds: M does not match the number of rows of C_l");
  if (j.contains("n") && j["n"].get<long>() != C_l.cols())
    throw InputError("bounds: n does not match the number of columns of C_l");
  return CrossCovBounds(C_l, C_u);
}

void write_bounds(std::ostream& out, const CrossCovBounds& b) {
  emit(out, {{"M", b.instrument_count()}, {"n", b.n()}, {"C_l", to_json(b.C_l())},
             {"C_u", to_json(b.C_u())}});
}

InstrumentSpec read_instrument_spec(std::istream& in) {
  const json j = parse(in);
  const std::string kind = field(j, "kind").get<std::string>();
  InstrumentSpec spec;
  if (kind == "lagged_input") {
    spec.kind = InstrumentKind::kLaggedInput;
    const json& lags = field(j, "lags");
    if (!lags.is_number_integer() || lags.get<int>() < 1)
      throw InputError("lags must be a positive integer");
    spec.lags = lags.get<int>();
  } else if (kind == "explicit") {
    spec.kind = InstrumentKind::kExplicit;
    spec.R_minus = matrix(field(j, "R_minus"), "R_minus");
  } else {
    throw InputError("unknown instrument kind '" + kind + "'");
  }
  return spec;
}

void write_instrument_spec(std::ostream& out, const InstrumentSpec& spec) {
  if (spec.kind == InstrumentKind::kLaggedInput) {
    emit(out, {{"kind", "lagged_input"}, {"lags", spec.lags}});
  } else {
    emit(out, {{"kind", "explicit"}, {"R_minus", to_json(spec.R_minus)}});
  }
}

FeasibleSet read_set(std::istream& in) {
  const json j = parse(in);
  FeasibleSet set;
  set.n = field(j, "n").get<int>();
  set.m = field(j, "m").get<int>();
  const MatrixXd G = matrix(field(j, "G"), "G");
  if (G.rows() != set.n + set.m) throw InputError("G must have n + m rows");
  const json& rows = field(j, "rows");
  if (!rows.is_array() || static_cast<int>(rows.size()) != set.n)
    throw InputError("rows must hold n entries");
  const double inf = std::numeric_limits<double>::infinity();
  for (int r = 0; r < set.n; ++r) {
    RowPolyhedron row;
    row.G = G;
    row.row_index = r;
    row.lo = vector_with_nulls(field(rows[r], "lo"), -inf, "lo");
    row.hi = vector_with_nulls(field(rows[r], "hi"), inf, "hi");
    if (row.lo.size() != G.cols() || row.hi.size() != G.cols())
      throw InputError("row " + std::to_string(r) + ": lo and hi need one entry per instrument");
    for (Eigen::Index i = 0; i < G.cols(); ++i)
      if (row.lo(i) > row.hi(i))
        throw InputError("row " + std::to_string(r) + ": lo exceeds hi at instrument " +
                         std::to_string(i));
    set.rows.push_back(std::move(row));
  }
  try {
    set.bounded = boundedness_from_string(field(j, "bounded").get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  if (j.contains("rank_tolerance")) set.rank_tolerance = j["rank_tolerance"].get<double>();
  if (j.contains("singular_value_ratio"))
    set.singular_value_ratio = j["singular_value_ratio"].get<double>();
  return set;
}

void write_set(std::ostream& out, const FeasibleSet& set) {
  json rows = json::array();
  for (const auto& r : set.rows)
    rows.push_back({{"lo", to_json_vector(r.lo)}, {"hi", to_json_vector(r.hi)}});
  emit(out, {{"n", set.n},
             {"m", set.m},
             {"G", set.rows.empty() ? json::array() : to_json(set.rows.front().G)},
             {"rows", rows},
             {"bounded", to_string(set.bounded)},
             {"rank_tolerance", set.rank_tolerance},
             {"singular_value_ratio", set.singular_value_ratio}});
}

VertexSet read_vertices(std::istream& in) {
  const json j = parse(in);
  const json& per_row = field(j, "per_row");
  if (!per_row.is_array() || per_row.empty()) throw InputError("per_row must be a non-empty array");
  VertexSet vs;
  vs.n = static_cast<int>(per_row.size());
  int dim = -1;
  for (const auto& row : per_row) {
    std::vector<VectorXd> verts;
    for (const auto& v : row) {
      const MatrixXd M = matrix(json::array({v}), "vertex");
      if (dim < 0) dim = static_cast<int>(M.cols());
      if (M.cols() != dim) throw InputError("vertices must all have length n + m");
      verts.push_back(M.row(0).transpose());
    }
    if (verts.empty()) throw InputError("every row needs at least one vertex");
    vs.per_row.push_back(std::move(verts));
  }
  vs.m = dim - vs.n;
  if (vs.m < 1) throw InputError("vertices must have length n + m with m >= 1");
  if (j.contains("L") && j["L"].get<std::uint64_t>() != vs.count())
    throw InputError("L does not match the product of the per-row vertex counts");
  return vs;
}

void write_vertices(std::ostream& out, const VertexSet& vs) {
  json per_row = json::array();
  for (const auto& row : vs.per_row) {
    json verts = json::array();
    for (const auto& v : row) verts.push_back(to_json(v.transpose()).front());
    per_row.push_back(verts);
  }
  emit(out, {{"per_row", per_row}, {"L", vs.count()}});
}

SynthesisResult read_controller(std::istream& in) {
  const json j = parse(in);
  SynthesisResult r;
  r.K = matrix(field(j, "K"), "K");
  r.status = synth_status_from_string(field(j, "status").get<std::string>());
  if (j.contains("certificates"))
    for (const auto& [name, value] : j["certificates"].items()) r.certificates[name] = matrix(value, name);
  if (j.contains("gamma") && !j["gamma"].is_null()) r.achieved_gamma = j["gamma"].get<double>();
  if (j.contains("margins"))
    for (const auto& [name, value] : j["margins"].items()) r.margins[name] = value.get<double>();
  if (j.contains("method")) r.method = j["method"].get<std::string>();
  if (j.contains("message")) r.message = j["message"].get<std::string>();
  return r;
}

void write_controller(std::ostream& out, const SynthesisResult& r) {
  json certs = json::object();
  for (const auto& [name, M] : r.certificates) certs[name] = to_json(M);
  json margins = json::object();
  for (const auto& [name, v] : r.margins) margins[name] = v;
  json required = json::object();
  for (const auto& [name, v] : r.required_margins) required[name] = v;
  json j = {{"K", r.K.size() ? to_json(r.K) : json(nullptr)},
            {"certificates", certs},
            {"gamma", r.achieved_gamma ? json(*r.achieved_gamma) : json(nullptr)},
            {"status", to_string(r.status)},
            {"margins", margins},
            {"required_margins", required},
            {"method", r.method},
            {"message", r.message},
            {"vertex_count", r.vertex_count},
            {"solver_iterations", r.solver_iterations}};
  if (!r.boundary_values.empty()) j["boundary_values"] = r.boundary_values;
  emit(out, j);
}

PerformanceSpec read_perf(std::istream& in) {
  const json j = parse(in);
  PerformanceSpec p;
  p.C = matrix(field(j, "C"), "C");
  p.D = matrix(field(j, "D"), "D");
  if (p.C.rows() != p.D.rows() || p.C.cols() != p.D.cols())
    throw InputError("C and D must both be p x n");
  if (j.contains("gamma") && !j["gamma"].is_null()) p.gamma = number(j["gamma"], "gamma");
  return p;
}

SystemPair read_system(std::istream& in) {
  const json j = parse(in);
  SystemPair s{matrix(field(j, "A"), "A"), matrix(field(j, "B"), "B")};
  if (s.A.rows() != s.A.cols() || s.B.rows() != s.A.rows() || s.B.cols() < 1)
    throw InputError("system needs A: n x n and B: n x m");
  return s;
}

void write_system(std::ostream& out, const SystemPair& s) {
  emit(out, {{"A", to_json(s.A)}, {"B", to_json(s.B)}});
}

std::string read_text(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace polyinf::io
