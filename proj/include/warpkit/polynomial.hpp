#pragma once

#include "warpkit/jet.hpp"
#include "warpkit/scalar.hpp"

#include <map>
#include <string>
#include <vector>

namespace warpkit {

// Multivariate polynomial with exponent vectors as keys.
template <class S>
struct Polynomial {
  int nvars = 0;
  std::map<std::vector<int>, S> terms;

  Polynomial() = default;
  explicit Polynomial(int n) : nvars(n) {}

  static Polynomial constant(int n, const S& c) {
    Polynomial p(n);
    if (!(c == S(0))) p.terms[std::vector<int>(n, 0)] = c;
    return p;
  }
  static Polynomial variable(int n, int i) {
    Polynomial p(n);
    std::vector<int> e(n, 0);
    e[i] = 1;
    p.terms[e] = S(1);
    return p;
  }

  void add_term(const std::vector<int>& exps, const S& c) {
    if (static_cast<int>(exps.size()) != nvars) throw PreconditionError("polynomial term: wrong exponent count");
    for (int e : exps)
      if (e < 0) throw PreconditionError("polynomial term: negative exponent");
    S& slot = terms[exps];
    slot += c;
    if (slot == S(0)) terms.erase(exps);
  }

  int degree() const {
    int d = 0;
    for (const auto& [e, c] : terms) {
      int s = 0;
      for (int k : e) s += k;
      d = std::max(d, s);
    }
    return d;
  }

  // on scalars or jets
  template <class T>
  T eval(const std::vector<T>& x) const {
    if (static_cast<int>(x.size()) != nvars) throw PreconditionError("polynomial eval: wrong argument count");
    if (nvars == 0) throw PreconditionError("polynomial eval: no variables");
    T acc = constant_like(x[0], S(0));
    for (const auto& [e, c] : terms) {
      T mono = constant_like(x[0], c);
      for (int i = 0; i < nvars; ++i)
        for (int k = 0; k < e[i]; ++k) mono = mono * x[i];
      acc = acc + mono;
    }
    return acc;
  }

  Polynomial derivative(int i) const {
    Polynomial r(nvars);
    for (const auto& [e, c] : terms) {
      if (e[i] == 0) continue;
      std::vector<int> f = e;
      f[i] -= 1;
      r.add_term(f, c * S(e[i]));
    }
    return r;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    Polynomial r = a;
    for (const auto& [e, c] : b.terms) r.add_term(e, c);
    return r;
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    Polynomial r = a;
    for (const auto& [e, c] : b.terms) r.add_term(e, -c);
    return r;
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.nvars != b.nvars) throw PreconditionError("polynomial product: variable count mismatch");
    Polynomial r(a.nvars);
    for (const auto& [e1, c1] : a.terms)
      for (const auto& [e2, c2] : b.terms) {
        std::vector<int> e(a.nvars);
        for (int i = 0; i < a.nvars; ++i) e[i] = e1[i] + e2[i];
        r.add_term(e, c1 * c2);
      }
    return r;
  }
  friend Polynomial operator*(const S& t, const Polynomial& a) { return Polynomial::constant(a.nvars, t) * a; }
};

// Polynomial map R^dim -> R^comps.size().
template <class S>
struct PolyMap {
  int dim = 0;
  std::vector<Polynomial<S>> comps;

  int cod() const { return static_cast<int>(comps.size()); }

  Vec<S> at(const Vec<S>& x) const {
    std::vector<S> xs(x.data(), x.data() + x.size());
    Vec<S> r(cod());
    for (int i = 0; i < cod(); ++i) r[i] = comps[i].eval(xs);
    return r;
  }

  // DF . W as a polynomial map
  PolyMap directional(const PolyMap& W) const {
    if (W.cod() != dim) throw PreconditionError("directional derivative: dimension mismatch");
    PolyMap r{dim, {}};
    for (const auto& f : comps) {
      Polynomial<S> acc(dim);
      for (int j = 0; j < dim; ++j) acc = acc + f.derivative(j) * W.comps[j];
      r.comps.push_back(acc);
    }
    return r;
  }

  // jacobian matrix at x
  Mat<S> jacobian(const Vec<S>& x) const {
    Mat<S> J(cod(), dim);
    std::vector<S> xs(x.data(), x.data() + x.size());
    for (int i = 0; i < cod(); ++i)
      for (int j = 0; j < dim; ++j) J(i, j) = comps[i].derivative(j).eval(xs);
    return J;
  }

  SmoothMap<S> as_smooth_map() const {
    PolyMap self = *this;
    return {dim, cod(), [self](const JetPoint<S>& x) {
              JetPoint<S> r;
              for (const auto& f : self.comps) r.comps.push_back(f.eval(x.comps));
              return r;
            }};
  }

  friend PolyMap operator-(const PolyMap& a, const PolyMap& b) {
    if (a.dim != b.dim || a.cod() != b.cod()) throw PreconditionError("polynomial map difference: shape mismatch");
    PolyMap r{a.dim, {}};
    for (int i = 0; i < a.cod(); ++i) r.comps.push_back(a.comps[i] - b.comps[i]);
    return r;
  }
  friend PolyMap operator+(const PolyMap& a, const PolyMap& b) {
    if (a.dim != b.dim || a.cod() != b.cod()) throw PreconditionError("polynomial map sum: shape mismatch");
    PolyMap r{a.dim, {}};
    for (int i = 0; i < a.cod(); ++i) r.comps.push_back(a.comps[i] + b.comps[i]);
    return r;
  }
};

template <class S>
using PolyField = PolyMap<S>;

// [X,Y] = DY.X - DX.Y
template <class S>
PolyField<S> poly_bracket(const PolyField<S>& X, const PolyField<S>& Y) {
  return Y.directional(X) - X.directional(Y);
}

// sparse integer coefficients in [-9, 9]
template <class S>
PolyMap<S> rand_poly_map(int dim, int cod, int maxDeg, int maxTerms, Rng& rng) {
  PolyMap<S> F{dim, {}};
  for (int i = 0; i < cod; ++i) {
    Polynomial<S> p(dim);
    int n = rng.uniform_int(1, maxTerms);
    for (int t = 0; t < n; ++t) {
      std::vector<int> e(dim, 0);
      int budget = rng.uniform_int(0, maxDeg);
      for (int k = 0; k < budget; ++k) e[rng.uniform_int(0, dim - 1)] += 1;
      p.add_term(e, S(rng.uniform_int(kRandLo, kRandHi)));
    }
    F.comps.push_back(p);
  }
  return F;
}

template <class S>
PolyField<S> rand_poly_field(int dim, int maxDeg, int maxTerms, Rng& rng) {
  return rand_poly_map<S>(dim, dim, maxDeg, maxTerms, rng);
}

// points in [-1, 1]: k/4 for exact scalars, k/1000 for floats so rounding shows up
template <class S>
Vec<S> rand_grid_point(int dim, Rng& rng) {
  const int den = ScalarTraits<S>::exact ? 4 : 1000;
  Vec<S> v(dim);
  for (int i = 0; i < dim; ++i) v[i] = S(rng.uniform_int(-den, den)) / S(den);
  return v;
}

}  // namespace warpkit
