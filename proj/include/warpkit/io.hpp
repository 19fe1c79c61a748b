#pragma once

#include "warpkit/cli.hpp"
#include "warpkit/connection.hpp"
#include "warpkit/polynomial.hpp"
#include "warpkit/tvb.hpp"

#include <json.hpp>

#include <fstream>
#include <string>

namespace warpkit {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using json = nlohmann::json;

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open input file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("input file '" + path + "' is not valid JSON: " + e.what());
  }
}

// strings ("p/q", decimals) and integers; binary floats only in float64 mode
template <class S>
S scalar_from_json(const json& j, const std::string& where) {
  if (j.is_string()) {
    try {
      return parse_scalar<S>(j.get<std::string>());
    } catch (const std::exception& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  if (j.is_number_integer()) return S(j.get<long long>());
  if (j.is_number_float()) {
    if (ScalarTraits<S>::exact)
      throw InputError(where + ": binary floating-point number in rational mode; write it as a string");
    return S(j.get<double>());
  }
  throw InputError(where + ": expected a number or a numeric string");
}

template <class S>
Vec<S> vec_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array");
  Vec<S> v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = scalar_from_json<S>(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

// rows x cols, row-major nested arrays
template <class S>
Mat<S> mat_from_json(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& where) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw InputError(where + ": expected " + std::to_string(rows) + " rows");
  Mat<S> m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw InputError(where + ": row " + std::to_string(r) + " must have " + std::to_string(cols) + " entries");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = scalar_from_json<S>(row[c], where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  }
  return m;
}

// list of {"exps": [...], "coef": ...}
template <class S>
Polynomial<S> poly_from_json(const json& j, int nvars, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": a polynomial is a list of terms");
  Polynomial<S> p(nvars);
  for (std::size_t t = 0; t < j.size(); ++t) {
    const json& term = j[t];
    std::string w = where + "[" + std::to_string(t) + "]";
    if (!term.is_object() || !term.contains("exps") || !term.contains("coef"))
      throw InputError(w + ": a term needs \"exps\" and \"coef\"");
    const json& e = term["exps"];
    if (!e.is_array() || static_cast<int>(e.size()) != nvars)
      throw InputError(w + ": \"exps\" must list " + std::to_string(nvars) + " exponents");
    std::vector<int> exps;
    for (const auto& x : e) {
      if (!x.is_number_integer() || x.get<int>() < 0) throw InputError(w + ": exponents are non-negative integers");
      exps.push_back(x.get<int>());
    }
    p.add_term(exps, scalar_from_json<S>(term["coef"], w + ".coef"));
  }
  return p;
}

// {"dim": p, "components": [poly, ...]}
template <class S>
PolyMap<S> polymap_from_json(const json& j, const std::string& where, int expectDim = -1, int expectCod = -1) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("components"))
    throw InputError(where + ": expected {\"dim\": p, \"components\": [...]}");
  if (!j["dim"].is_number_integer() || j["dim"].get<int>() < 1) throw InputError(where + ": \"dim\" must be >= 1");
  PolyMap<S> f{j["dim"].get<int>(), {}};
  if (expectDim >= 0 && f.dim != expectDim)
    throw InputError(where + ": dimension " + std::to_string(f.dim) + ", expected " + std::to_string(expectDim));
  const json& comps = j["components"];
  if (!comps.is_array()) throw InputError(where + ": \"components\" must be an array");
  for (std::size_t i = 0; i < comps.size(); ++i)
    f.comps.push_back(poly_from_json<S>(comps[i], f.dim, where + ".components[" + std::to_string(i) + "]"));
  if (expectCod >= 0 && f.cod() != expectCod)
    throw InputError(where + ": " + std::to_string(f.cod()) + " components, expected " + std::to_string(expectCod));
  return f;
}

template <class S>
struct FieldTriple {
  PolyField<S> X, Y, Z;
};

// {"X": field, "Y": field, "Z": field}, all vector fields on the same R^p
template <class S>
FieldTriple<S> field_triple_from_json(const json& j) {
  FieldTriple<S> t;
  for (const char* k : {"X", "Y", "Z"})
    if (!j.contains(k)) throw InputError(std::string("field input: missing \"") + k + "\"");
  t.X = polymap_from_json<S>(j["X"], "X");
  t.Y = polymap_from_json<S>(j["Y"], "Y", t.X.dim, t.X.dim);
  t.Z = polymap_from_json<S>(j["Z"], "Z", t.X.dim, t.X.dim);
  if (t.X.cod() != t.X.dim) throw InputError("X: a vector field needs dim components");
  return t;
}

template <class S>
struct PolyConnectionData {
  int p = 0, q = 0;
  std::vector<Polynomial<S>> gamma;  // k*q*q + i*q + j
  PolyField<S> X, Z;
  PolyMap<S> mu;

  Connection<S> connection() const { return {p, q, PolyMap<S>{p, gamma}.as_smooth_map()}; }
};

// {"p", "q", "gamma": [k][i][j] polynomials, "X", "Z", "mu"}
template <class S>
PolyConnectionData<S> connection_from_json(const json& j) {
  for (const char* k : {"p", "q", "gamma", "X", "Z", "mu"})
    if (!j.contains(k)) throw InputError(std::string("connection input: missing \"") + k + "\"");
  PolyConnectionData<S> d;
  d.p = j["p"].get<int>();
  d.q = j["q"].get<int>();
  if (d.p < 1 || d.q < 1) throw InputError("connection input: p and q must be >= 1");
  const json& g = j["gamma"];
  if (!g.is_array() || static_cast<int>(g.size()) != d.p) throw InputError("gamma: expected p blocks");
  for (int k = 0; k < d.p; ++k) {
    if (!g[k].is_array() || static_cast<int>(g[k].size()) != d.q) throw InputError("gamma: expected q rows per block");
    for (int i = 0; i < d.q; ++i) {
      if (!g[k][i].is_array() || static_cast<int>(g[k][i].size()) != d.q)
        throw InputError("gamma: expected q entries per row");
      for (int jj = 0; jj < d.q; ++jj)
        d.gamma.push_back(poly_from_json<S>(g[k][i][jj], d.p,
                                            "gamma[" + std::to_string(k) + "][" + std::to_string(i) + "][" +
                                                std::to_string(jj) + "]"));
    }
  }
  d.X = polymap_from_json<S>(j["X"], "X", d.p, d.p);
  d.Z = polymap_from_json<S>(j["Z"], "Z", d.p, d.p);
  d.mu = polymap_from_json<S>(j["mu"], "mu", d.p, d.q);
  return d;
}

template <class S>
LinearDoubleSection<S> lds_from_json(const json& j, const TvbShape& sh, Direction dir, const std::string& where) {
  LinearDoubleSection<S> L;
  L.direction = dir;
  int b, x, y, ex, ey, core;
  switch (dir) {
    case Direction::X: b = E1, x = E2, y = E3, ex = E12, ey = E13, core = E23; break;
    case Direction::Y: b = E2, x = E1, y = E3, ex = E12, ey = E23, core = E13; break;
    default: b = E3, x = E1, y = E2, ex = E13, ey = E23, core = E12; break;
  }
  for (const char* k : {"base", "edge1", "edge2", "core", "twist"})
    if (!j.contains(k)) throw InputError(where + ": missing \"" + k + "\"");
  L.base = vec_from_json<S>(j["base"], where + ".base");
  if (L.base.size() != sh[b]) throw InputError(where + ".base: wrong length");
  L.edge1 = mat_from_json<S>(j["edge1"], sh[ex], sh[x], where + ".edge1");
  L.edge2 = mat_from_json<S>(j["edge2"], sh[ey], sh[y], where + ".edge2");
  L.core = mat_from_json<S>(j["core"], sh[E123], sh[core], where + ".core");
  const json& t = j["twist"];
  if (!t.is_array() || static_cast<Eigen::Index>(t.size()) != sh[E123])
    throw InputError(where + ".twist: expected one matrix per ultracore component");
  L.twist = BilMap<S>(sh[x], sh[y], sh[E123]);
  for (Eigen::Index c = 0; c < sh[E123]; ++c)
    L.twist.tensor[c] = mat_from_json<S>(t[c], sh[x], sh[y], where + ".twist[" + std::to_string(c) + "]");
  return L;
}

// {"shape": [7 dims], "X": lds, "Y": lds, "Z": lds}
template <class S>
Grid3<S> grid_from_json(const json& j) {
  if (!j.contains("shape") || !j["shape"].is_array() || j["shape"].size() != 7)
    throw InputError("grid input: \"shape\" must list the seven slot dimensions");
  Grid3<S> g;
  for (int i = 0; i < 7; ++i) {
    if (!j["shape"][i].is_number_integer() || j["shape"][i].get<int>() < 0)
      throw InputError("grid input: slot dimensions are non-negative integers");
    g.shape.d[i] = j["shape"][i].get<int>();
  }
  for (const char* k : {"X", "Y", "Z"})
    if (!j.contains(k)) throw InputError(std::string("grid input: missing \"") + k + "\"");
  g.x = lds_from_json<S>(j["X"], g.shape, Direction::X, "X");
  g.y = lds_from_json<S>(j["Y"], g.shape, Direction::Y, "Y");
  g.z = lds_from_json<S>(j["Z"], g.shape, Direction::Z, "Z");
  return g;
}

}  // namespace warpkit
