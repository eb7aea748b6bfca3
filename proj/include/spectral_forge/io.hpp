#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spectral_forge/decomposition.hpp"
#include "spectral_forge/error.hpp"
#include "spectral_forge/matrix.hpp"
#include "spectral_forge/pipeline.hpp"
#include "spectral_forge/product_measure.hpp"
#include "spectral_forge/report.hpp"
#include "spectral_forge/spectral_measure.hpp"

// JSON forms of every artifact. Doubles are written in the shortest decimal
// form that reads back to the same bits, so read(write(x)) == x exactly.
namespace spectral_forge::io {

using json = nlohmann::json;

namespace detail {

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::ParseError, where + ": " + what);
}

inline const json& field(const json& j, const char* name, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(name);
  if (it == j.end()) fail(where, std::string("missing field '") + name + "'");
  return *it;
}

inline double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "value is not finite");
  return v;
}

inline json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) fail(where, "expected [re, im]");
  return {number(j[0], where + "[0]"), number(j[1], where + "[1]")};
}

inline std::size_t dimension(const json& j, const std::string& where) {
  const json& d = field(j, "dim", where);
  if (!d.is_number_integer() || d.get<long long>() < 1) fail(where + ".dim", "expected a positive integer");
  return d.get<std::size_t>();
}

}  // namespace detail

inline json to_json(const Matrix& m) {
  m.require_square();
  json entries = json::array();
  for (const auto& z : m.data()) entries.push_back(detail::complex_to_json(z));
  return {{"dim", m.rows()}, {"entries", std::move(entries)}};
}

inline Matrix matrix_from_json(const json& j, const std::string& where = "matrix") {
  const std::size_t n = detail::dimension(j, where);
  const json& entries = detail::field(j, "entries", where);
  if (!entries.is_array()) detail::fail(where + ".entries", "expected an array");
  if (entries.size() != n * n) {
    detail::fail(where + ".entries", "dim " + std::to_string(n) + " needs " + std::to_string(n * n) +
                                         " entries, found " + std::to_string(entries.size()));
  }
  std::vector<Complex> values;
  values.reserve(n * n);
  for (std::size_t k = 0; k < entries.size(); ++k)
    values.push_back(detail::complex_from_json(entries[k], where + ".entries[" + std::to_string(k) + "]"));
  return Matrix(n, n, std::move(values));
}

inline json to_json(const SpectralMeasure& e) {
  json atoms = json::array();
  for (const auto& a : e.atoms()) {
    atoms.push_back({{"point", detail::complex_to_json(a.point)},
                     {"projection", to_json(a.projection.dense())},
                     {"rank", a.projection.rank()}});
  }
  return {{"dim", e.dim()}, {"atoms", std::move(atoms)}, {"support_radius", e.support_radius()}};
}

inline SpectralMeasure measure_from_json(const json& j, const std::string& where = "measure") {
  const std::size_t n = detail::dimension(j, where);
  const json& atoms = detail::field(j, "atoms", where);
  if (!atoms.is_array()) detail::fail(where + ".atoms", "expected an array");
  std::vector<SpectralAtom> out;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const std::string at = where + ".atoms[" + std::to_string(k) + "]";
    const Complex point = detail::complex_from_json(detail::field(atoms[k], "point", at), at + ".point");
    Matrix p = matrix_from_json(detail::field(atoms[k], "projection", at), at + ".projection");
    if (p.rows() != n) detail::fail(at + ".projection", "dimension differs from measure dim");
    out.push_back({point, Projection::from_dense(std::move(p))});
  }
  return SpectralMeasure(n, std::move(out));
}

inline json to_json(const ProductMeasure& prod) {
  json atoms = json::array();
  for (const auto& a : prod.atoms()) {
    atoms.push_back({{"t", a.t},
                     {"w", detail::complex_to_json(a.w)},
                     {"projection", to_json(a.projection.dense())}});
  }
  return {{"dim", prod.dim()}, {"atoms", std::move(atoms)}};
}

inline json to_json(const VerificationReport& r) {
  json residuals = json::object();
  for (const auto& [k, v] : r.residuals) residuals[k] = v;
  json pass = json::object();
  for (const auto& [k, v] : r.pass) pass[k] = v;
  json tolerances = json::object();
  for (const auto& [k, v] : r.tolerances) tolerances[k] = v;
  return {{"residuals", std::move(residuals)}, {"pass", std::move(pass)}, {"tolerances", std::move(tolerances)}};
}

inline VerificationReport report_from_json(const json& j, const std::string& where = "report") {
  VerificationReport r;
  for (const auto& [k, v] : detail::field(j, "residuals", where).items())
    r.residuals[k] = detail::number(v, where + ".residuals." + k);
  for (const auto& [k, v] : detail::field(j, "pass", where).items()) {
    if (!v.is_boolean()) detail::fail(where + ".pass." + k, "expected a boolean");
    r.pass[k] = v.get<bool>();
  }
  for (const auto& [k, v] : detail::field(j, "tolerances", where).items())
    r.tolerances[k] = detail::number(v, where + ".tolerances." + k);
  return r;
}

inline json to_json(const Decomposition& d) {
  return {{"a", to_json(d.a)}, {"b", to_json(d.b)}, {"source_norm", d.source_norm}};
}

inline Decomposition decomposition_from_json(const json& j, const std::string& where = "decomposition") {
  Decomposition d;
  d.a = matrix_from_json(detail::field(j, "a", where), where + ".a");
  d.b = matrix_from_json(detail::field(j, "b", where), where + ".b");
  if (j.contains("source_norm")) d.source_norm = detail::number(j["source_norm"], where + ".source_norm");
  return d;
}

enum class Emit { all, measure, report };

inline Emit parse_emit(const std::string& s) {
  if (s == "all") return Emit::all;
  if (s == "measure") return Emit::measure;
  if (s == "report") return Emit::report;
  throw Error(ErrorKind::BadSpec, "--emit must be one of all, measure, report");
}

inline json to_json(const PipelineResult& res, Emit emit = Emit::all) {
  switch (emit) {
    case Emit::measure: return to_json(res.spectral_measure);
    case Emit::report: return to_json(res.report);
    case Emit::all: break;
  }
  return {{"decomposition", to_json(res.decomposition)},
          {"e1", to_json(res.e1)},
          {"e2", to_json(res.e2)},
          {"product", to_json(res.product)},
          {"spectral_measure", to_json(res.spectral_measure)},
          {"report", to_json(res.report)}};
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::FileError, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::FileError, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error(ErrorKind::FileError, "write to '" + path + "' failed");
}

inline json parse(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    detail::fail(where, e.what());
  }
}

inline Matrix read_matrix(const std::string& path) {
  return matrix_from_json(parse(read_text(path), path), path);
}

inline SpectralMeasure read_measure(const std::string& path) {
  return measure_from_json(parse(read_text(path), path), path);
}

inline Decomposition read_decomposition(const std::string& path) {
  return decomposition_from_json(parse(read_text(path), path), path);
}

inline void write_matrix(const std::string& path, const Matrix& m) { write_text(path, dump(to_json(m))); }
inline void write_pvm(const std::string& path, const SpectralMeasure& e) { write_text(path, dump(to_json(e))); }
inline void write_report(const std::string& path, const VerificationReport& r) {
  write_text(path, dump(to_json(r)));
}

}  // namespace spectral_forge::io
