#include "instance_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "qsde/errors.hpp"

namespace qsde::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw SchemaError(path + ": " + what);
}

std::string shape(Eigen::Index rows, Eigen::Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

const json& field(const json& obj, const std::string& key,
                  const std::string& path) {
  if (!obj.contains(key)) fail(path.empty() ? key : path + "." + key, "missing");
  return obj.at(key);
}

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

double real_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "NaN or Inf is not allowed");
  return x;
}

long long integer(const json& v, const std::string& path, long long lo) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  const long long x = v.get<long long>();
  if (x < lo) fail(path, "must be >= " + std::to_string(lo));
  return x;
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

Complex complex_number(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) fail(path, "expected a complex number [re, im]");
  return {real_number(v[0], index(path, 0)), real_number(v[1], index(path, 1))};
}

Vector vector(const json& v, const std::string& path, Eigen::Index size) {
  if (!v.is_array()) fail(path, "expected a list of complex numbers");
  if (static_cast<Eigen::Index>(v.size()) != size) {
    fail(path, "expected length " + std::to_string(size) + ", got " +
                   std::to_string(v.size()));
  }
  Vector out(size);
  for (std::size_t i = 0; i < v.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = complex_number(v[i], index(path, i));
  }
  return out;
}

Eigen::Index rows_of(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected a matrix (list of rows)");
  return static_cast<Eigen::Index>(v.size());
}

Eigen::Index cols_of(const json& v, const std::string& path) {
  if (v.empty()) return 0;
  if (!v[0].is_array()) fail(index(path, 0), "expected a row (list of complex numbers)");
  return static_cast<Eigen::Index>(v[0].size());
}

Matrix matrix(const json& v, const std::string& path, Eigen::Index rows,
              Eigen::Index cols) {
  const Eigen::Index r = rows_of(v, path);
  const Eigen::Index c = r == rows ? cols_of(v, path) : -1;
  if (r != rows || c != cols) {
    fail(path, "expected " + shape(rows, cols) + " matrix, got " +
                   (r == rows ? shape(r, c) : std::to_string(r) + " rows"));
  }
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    out.row(i) = vector(v[static_cast<std::size_t>(i)],
                        index(path, static_cast<std::size_t>(i)), cols)
                     .transpose();
  }
  return out;
}

std::vector<Matrix> matrix_list(const json& v, const std::string& path,
                                Eigen::Index count, Eigen::Index rows,
                                Eigen::Index cols) {
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != count) {
    fail(path, "expected a list of " + std::to_string(count) + " matrices");
  }
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(matrix(v[i], index(path, i), rows, cols));
  }
  return out;
}

Coefficient parse_phi(const json& v, Eigen::Index d, Eigen::Index m) {
  const Eigen::Index dhat = d + 1;
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != dhat) {
    fail("phi", "expected " + std::to_string(dhat) + " rows of slices (d+1)");
  }
  std::vector<Matrix> theta;
  for (std::size_t mu = 0; mu < v.size(); ++mu) {
    const std::string row_path = index("phi", mu);
    if (!v[mu].is_array() || static_cast<Eigen::Index>(v[mu].size()) != dhat) {
      fail(row_path, "expected " + std::to_string(dhat) + " slices (d+1)");
    }
    for (std::size_t nu = 0; nu < v[mu].size(); ++nu) {
      theta.push_back(matrix(v[mu][nu], index(row_path, nu), m, m));
    }
  }
  return Coefficient(d, std::move(theta));
}

StepFunction parse_step_function(const json& v, const std::string& path,
                                 Eigen::Index d) {
  if (!v.is_object()) fail(path, "expected {breakpoints, values}");
  const json& bp = field(v, "breakpoints", path);
  const json& vals = field(v, "values", path);
  if (!bp.is_array() || !vals.is_array()) {
    fail(path, "breakpoints and values must be lists");
  }
  if (bp.size() != vals.size()) {
    fail(path, std::to_string(bp.size()) + " breakpoints but " +
                   std::to_string(vals.size()) + " values");
  }
  std::vector<double> breakpoints;
  std::vector<Vector> values;
  for (std::size_t j = 0; j < bp.size(); ++j) {
    breakpoints.push_back(real_number(bp[j], index(child(path, "breakpoints"), j)));
    values.push_back(vector(vals[j], index(child(path, "values"), j), d));
  }
  try {
    return StepFunction(d, std::move(breakpoints), std::move(values));
  } catch (const DimensionError& e) {
    fail(path, e.what());
  }
}

coalg::Coalgebra parse_coalgebra(const json& v, CoalgebraSection& section,
                                 Eigen::Index d) {
  const std::string path = "coalgebra";
  const json& delta = field(v, "delta", path);
  if (!delta.is_array() || delta.empty()) {
    fail(child(path, "delta"), "expected a nonempty list of matrices");
  }
  const auto m = static_cast<Eigen::Index>(delta.size());
  coalg::Coalgebra c;
  c.m = m;
  c.delta = matrix_list(delta, child(path, "delta"), m, m, m);
  c.counit = vector(field(v, "counit", path), child(path, "counit"), m);
  section.varphi.varphi =
      matrix_list(field(v, "varphi", path), child(path, "varphi"), m, d + 1, d + 1);
  return c;
}

}  // namespace

const StepFunction& Instance::step_function(const std::string& name) const {
  const auto it = step_functions.find(name);
  if (it == step_functions.end()) {
    std::string known;
    for (const auto& [key, _] : step_functions) known += (known.empty() ? "" : ", ") + key;
    throw SchemaError("unknown step function '" + name + "' (known: " + known + ")");
  }
  return it->second;
}

namespace {

bool same(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

bool same(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                    [](const Matrix& x, const Matrix& y) { return same(x, y); });
}

bool same(const std::optional<CoalgebraSection>& x,
          const std::optional<CoalgebraSection>& y) {
  if (x.has_value() != y.has_value()) return false;
  if (!x) return true;
  return x->coalgebra.m == y->coalgebra.m &&
         same(x->coalgebra.counit, y->coalgebra.counit) &&
         same(x->coalgebra.delta, y->coalgebra.delta) &&
         same(x->varphi.varphi, y->varphi.varphi);
}

}  // namespace

bool operator==(const Instance& a, const Instance& b) {
  const bool same_involution =
      a.involution.has_value() == b.involution.has_value() &&
      (!a.involution || same(*a.involution, *b.involution));
  return a.d == b.d && a.m == b.m && a.p == b.p && a.p_prime == b.p_prime &&
         a.phi == b.phi && a.kappa == b.kappa && same_involution &&
         a.step_functions == b.step_functions &&
         a.fe_constant.kind == b.fe_constant.kind &&
         a.fe_constant.value == b.fe_constant.value && a.defaults == b.defaults &&
         a.seed == b.seed && same(a.coalgebra, b.coalgebra);
}

Instance parse_instance(const json& doc) {
  if (!doc.is_object()) fail("$", "instance must be a JSON object");
  Instance out;
  out.d = integer(field(doc, "d", ""), "d", 0);
  out.m = integer(field(doc, "m", ""), "m", 1);
  out.phi = parse_phi(field(doc, "phi", ""), out.d, out.m);

  const bool has_p = doc.contains("p");
  const bool has_pp = doc.contains("p_prime");
  if (has_p) out.p = integer(doc["p"], "p", 1);
  if (has_pp) out.p_prime = integer(doc["p_prime"], "p_prime", 1);
  if (doc.contains("kappa")) {
    const json& k = doc["kappa"];
    if (!k.is_array() || static_cast<Eigen::Index>(k.size()) != out.m) {
      fail("kappa", "expected one matrix per basis vector of V (m = " +
                        std::to_string(out.m) + ")");
    }
    const Eigen::Index rows = has_pp ? out.p_prime : rows_of(k[0], "kappa[0]");
    const Eigen::Index cols = has_p ? out.p : cols_of(k[0], "kappa[0]");
    if (rows < 1 || cols < 1) fail("kappa[0]", "images must be nonempty matrices");
    out.kappa = InitialMap(rows, cols, matrix_list(k, "kappa", out.m, rows, cols));
    out.p = cols;
    out.p_prime = rows;
  } else {
    // Default: V realised as diagonal m x m matrices.
    const Eigen::Index p = has_p ? out.p : out.m;
    const Eigen::Index pp = has_pp ? out.p_prime : out.m;
    if (p != out.m || pp != out.m) {
      fail("kappa", "missing; the default needs p = p_prime = m = " +
                        std::to_string(out.m) + ", got p = " + std::to_string(p) +
                        ", p_prime = " + std::to_string(pp));
    }
    out.kappa = InitialMap::diagonal_embedding(out.m);
    out.p = out.p_prime = out.m;
  }

  if (doc.contains("involution") && !doc["involution"].is_null()) {
    out.involution = matrix(doc["involution"], "involution", out.m, out.m);
  }

  out.step_functions.emplace("zero", StepFunction(out.d));
  if (doc.contains("step_functions")) {
    const json& lib = doc["step_functions"];
    if (!lib.is_object()) fail("step_functions", "expected an object of named functions");
    for (const auto& [name, value] : lib.items()) {
      const std::string path = "step_functions." + name;
      auto f = parse_step_function(value, path, out.d);
      if (name == "zero" && !(f == StepFunction(out.d))) {
        fail(path, "the name 'zero' is reserved for the zero function");
      }
      out.step_functions.insert_or_assign(name, std::move(f));
    }
  }

  if (doc.contains("constants")) {
    const json& c = doc["constants"];
    if (!c.is_object()) fail("constants", "expected an object");
    if (c.contains("fe_constant")) {
      const json& fe = c["fe_constant"];
      try {
        out.fe_constant = fe.is_number()
                              ? FockConstant{FockConstant::Kind::fixed,
                                             real_number(fe, "constants.fe_constant")}
                              : FockConstant::parse(fe.is_string() ? fe.get<std::string>()
                                                                   : fe.dump());
      } catch (const DimensionError& e) {
        fail("constants.fe_constant", e.what());
      }
      if (out.fe_constant.value < 0.0) fail("constants.fe_constant", "must be >= 0");
    }
  }

  if (doc.contains("defaults")) {
    const json& d = doc["defaults"];
    if (!d.is_object()) fail("defaults", "expected an object");
    auto& e = out.defaults;
    if (d.contains("truncation")) e.truncation = static_cast<int>(integer(d["truncation"], "defaults.truncation", 0));
    if (d.contains("slots")) e.slots = static_cast<int>(integer(d["slots"], "defaults.slots", 1));
    if (d.contains("quadrature_steps")) {
      e.quadrature_steps = static_cast<int>(integer(d["quadrature_steps"], "defaults.quadrature_steps", 2));
      if (e.quadrature_steps % 2) fail("defaults.quadrature_steps", "must be even");
    }
    if (d.contains("t")) {
      e.t = real_number(d["t"], "defaults.t");
      if (e.t < 0.0) fail("defaults.t", "must be >= 0");
    }
    if (d.contains("g")) e.g = text(d["g"], "defaults.g");
    if (d.contains("gprime")) e.g_prime = text(d["gprime"], "defaults.gprime");
    for (const auto* name : {&e.g, &e.g_prime}) {
      if (!out.step_functions.count(*name)) {
        fail(name == &e.g ? "defaults.g" : "defaults.gprime",
             "unknown step function '" + *name + "'");
      }
    }
  }

  if (doc.contains("seed")) {
    out.seed = static_cast<std::uint64_t>(integer(doc["seed"], "seed", 0));
  }

  if (doc.contains("coalgebra") && !doc["coalgebra"].is_null()) {
    CoalgebraSection section;
    section.coalgebra = parse_coalgebra(doc["coalgebra"], section, out.d);
    out.coalgebra = std::move(section);
  }
  return out;
}

Instance parse_instance_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path.string() + ": cannot open instance file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  return parse_instance(doc);
}

json encode(const Complex& z) { return json::array({z.real(), z.imag()}); }

json encode(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(encode(v(i)));
  return out;
}

json encode(const Matrix& a) {
  json out = json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(encode(a(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

json encode(const StepFunction& f) {
  json values = json::array();
  for (const auto& v : f.values()) values.push_back(encode(v));
  return {{"breakpoints", f.breakpoints()}, {"values", std::move(values)}};
}

json encode(const MatrixValuedMap& map) {
  json out = json::array();
  for (const auto& image : map.images()) out.push_back(encode(image));
  return out;
}

json to_json(const Instance& instance) {
  json phi = json::array();
  for (Eigen::Index mu = 0; mu < instance.phi.dhat(); ++mu) {
    json row = json::array();
    for (Eigen::Index nu = 0; nu < instance.phi.dhat(); ++nu) {
      row.push_back(encode(instance.phi.theta(mu, nu)));
    }
    phi.push_back(std::move(row));
  }
  json lib = json::object();
  for (const auto& [name, f] : instance.step_functions) {
    if (name != "zero") lib[name] = encode(f);
  }
  const auto& fe = instance.fe_constant;
  json out = {
      {"d", instance.d},
      {"m", instance.m},
      {"p", instance.p},
      {"p_prime", instance.p_prime},
      {"phi", std::move(phi)},
      {"kappa", encode(instance.kappa)},
      {"step_functions", std::move(lib)},
      {"constants",
       {{"fe_constant", fe.kind == FockConstant::Kind::fixed ? json(fe.value)
                                                             : json(fe.name())}}},
      {"defaults",
       {{"truncation", instance.defaults.truncation},
        {"slots", instance.defaults.slots},
        {"quadrature_steps", instance.defaults.quadrature_steps},
        {"t", instance.defaults.t},
        {"g", instance.defaults.g},
        {"gprime", instance.defaults.g_prime}}},
      {"seed", instance.seed},
  };
  if (instance.involution) out["involution"] = encode(*instance.involution);
  if (instance.coalgebra) {
    json delta = json::array();
    for (const auto& slab : instance.coalgebra->coalgebra.delta) delta.push_back(encode(slab));
    json varphi = json::array();
    for (const auto& v : instance.coalgebra->varphi.varphi) varphi.push_back(encode(v));
    out["coalgebra"] = {{"delta", std::move(delta)},
                        {"counit", encode(instance.coalgebra->coalgebra.counit)},
                        {"varphi", std::move(varphi)}};
  }
  return out;
}

}  // namespace qsde::cli
