#pragma once

// Reference values computed without jets: polynomial partials are taken
// directly from the exponent vectors, and brackets, covariant derivatives and
// curvature are assembled from those partials by index formulas.

#include "warpkit/polynomial.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using warpkit::Mat;
using warpkit::PolyMap;
using warpkit::Polynomial;
using warpkit::Vec;

// d^alpha p at x, alpha given as a list of variable indices (repeats allowed)
template <class S>
S partial(const Polynomial<S>& p, const std::vector<int>& alpha, const Vec<S>& x) {
  std::vector<int> need(p.nvars, 0);
  for (int i : alpha) ++need[i];
  S acc(0);
  for (const auto& [e, c] : p.terms) {
    S t = c;
    bool zero = false;
    for (int i = 0; i < p.nvars && !zero; ++i) {
      if (e[i] < need[i]) {
        zero = true;
        break;
      }
      for (int k = 0; k < need[i]; ++k) t *= S(e[i] - k);
      for (int k = 0; k < e[i] - need[i]; ++k) t *= x[i];
    }
    if (!zero) acc += t;
  }
  return acc;
}

template <class S>
Vec<S> value(const PolyMap<S>& F, const Vec<S>& x) {
  Vec<S> r(F.cod());
  for (int i = 0; i < F.cod(); ++i) r[i] = partial(F.comps[i], {}, x);
  return r;
}

template <class S>
S d1(const PolyMap<S>& F, int i, int j, const Vec<S>& x) {
  return partial(F.comps[i], {j}, x);
}

template <class S>
S d2(const PolyMap<S>& F, int i, int j, int k, const Vec<S>& x) {
  return partial(F.comps[i], {j, k}, x);
}

// [A,B]_i = sum_j dB_i/dx_j A_j - dA_i/dx_j B_j
template <class S>
Vec<S> bracket(const PolyMap<S>& A, const PolyMap<S>& B, const Vec<S>& x) {
  const int p = A.dim;
  Vec<S> r(p);
  for (int i = 0; i < p; ++i) {
    S s(0);
    for (int j = 0; j < p; ++j) s += d1(B, i, j, x) * partial(A.comps[j], {}, x) - d1(A, i, j, x) * partial(B.comps[j], {}, x);
    r[i] = s;
  }
  return r;
}

// d/dx_k of [B,C]_i
template <class S>
S bracket_partial(const PolyMap<S>& B, const PolyMap<S>& C, int i, int k, const Vec<S>& x) {
  S s(0);
  for (int j = 0; j < B.dim; ++j) {
    S Bj = partial(B.comps[j], {}, x), Cj = partial(C.comps[j], {}, x);
    s += d2(C, i, j, k, x) * Bj + d1(C, i, j, x) * d1(B, j, k, x) - d2(B, i, j, k, x) * Cj - d1(B, i, j, x) * d1(C, j, k, x);
  }
  return s;
}

// [A,[B,C]]
template <class S>
Vec<S> nested_bracket(const PolyMap<S>& A, const PolyMap<S>& B, const PolyMap<S>& C, const Vec<S>& x) {
  const int p = A.dim;
  Vec<S> BC = bracket(B, C, x);
  Vec<S> r(p);
  for (int i = 0; i < p; ++i) {
    S s(0);
    for (int k = 0; k < p; ++k) s += bracket_partial(B, C, i, k, x) * partial(A.comps[k], {}, x) - d1(A, i, k, x) * BC[k];
    r[i] = s;
  }
  return r;
}

// polynomial connection data: gamma[k*q*q + i*q + j]
template <class S>
struct Conn {
  int p, q;
  std::vector<Polynomial<S>> gamma;
  const Polynomial<S>& g(int k, int i, int j) const { return gamma[k * q * q + i * q + j]; }
};

// Gamma(x)(v) as a q x q matrix
template <class S>
Mat<S> gamma_of(const Conn<S>& c, const Vec<S>& x, const Vec<S>& v) {
  Mat<S> M = Mat<S>::Zero(c.q, c.q);
  for (int k = 0; k < c.p; ++k)
    for (int i = 0; i < c.q; ++i)
      for (int j = 0; j < c.q; ++j) M(i, j) += v[k] * partial(c.g(k, i, j), {}, x);
  return M;
}

// (D_W Gamma)(V) at x
template <class S>
Mat<S> dgamma(const Conn<S>& c, const Vec<S>& x, const Vec<S>& W, const Vec<S>& V) {
  Mat<S> M = Mat<S>::Zero(c.q, c.q);
  for (int k = 0; k < c.p; ++k)
    for (int l = 0; l < c.p; ++l)
      for (int i = 0; i < c.q; ++i)
        for (int j = 0; j < c.q; ++j) M(i, j) += V[k] * W[l] * partial(c.g(k, i, j), {l}, x);
  return M;
}

// nabla_Z mu = Dmu Z + Gamma(Z) mu
template <class S>
Vec<S> cov(const Conn<S>& c, const PolyMap<S>& Z, const PolyMap<S>& mu, const Vec<S>& x) {
  Vec<S> Zx = value(Z, x), r(c.q);
  for (int i = 0; i < c.q; ++i) {
    S s(0);
    for (int j = 0; j < c.p; ++j) s += d1(mu, i, j, x) * Zx[j];
    r[i] = s;
  }
  return r + gamma_of(c, x, Zx) * value(mu, x);
}

// d/dx_l of (nabla_Z mu)_i
template <class S>
S cov_partial(const Conn<S>& c, const PolyMap<S>& Z, const PolyMap<S>& mu, int i, int l, const Vec<S>& x) {
  S s(0);
  for (int j = 0; j < c.p; ++j) s += d2(mu, i, j, l, x) * partial(Z.comps[j], {}, x) + d1(mu, i, j, x) * d1(Z, j, l, x);
  for (int k = 0; k < c.p; ++k)
    for (int j = 0; j < c.q; ++j) {
      S Zk = partial(Z.comps[k], {}, x), muj = partial(mu.comps[j], {}, x);
      s += d1(Z, k, l, x) * partial(c.g(k, i, j), {}, x) * muj + Zk * partial(c.g(k, i, j), {l}, x) * muj +
           Zk * partial(c.g(k, i, j), {}, x) * d1(mu, j, l, x);
    }
  return s;
}

// nabla_X nabla_Z mu
template <class S>
Vec<S> cov_cov(const Conn<S>& c, const PolyMap<S>& X, const PolyMap<S>& Z, const PolyMap<S>& mu, const Vec<S>& x) {
  Vec<S> Xx = value(X, x), r(c.q);
  for (int i = 0; i < c.q; ++i) {
    S s(0);
    for (int l = 0; l < c.p; ++l) s += cov_partial(c, Z, mu, i, l, x) * Xx[l];
    r[i] = s;
  }
  return r + gamma_of(c, x, Xx) * cov(c, Z, mu, x);
}

// nabla along the vector field [Z,X], given pointwise
template <class S>
Vec<S> cov_along(const Conn<S>& c, const Vec<S>& V, const PolyMap<S>& mu, const Vec<S>& x) {
  Vec<S> r(c.q);
  for (int i = 0; i < c.q; ++i) {
    S s(0);
    for (int j = 0; j < c.p; ++j) s += d1(mu, i, j, x) * V[j];
    r[i] = s;
  }
  return r + gamma_of(c, x, V) * value(mu, x);
}

// R(Z,X) = (D_X Gamma)(Z) - (D_Z Gamma)(X) + Gamma(X)Gamma(Z) - Gamma(Z)Gamma(X)
template <class S>
Mat<S> curvature(const Conn<S>& c, const Vec<S>& Z, const Vec<S>& X, const Vec<S>& x) {
  Mat<S> GX = gamma_of(c, x, X), GZ = gamma_of(c, x, Z);
  return dgamma(c, x, X, Z) - dgamma(c, x, Z, X) + GX * GZ - GZ * GX;
}

// central differences of f : R^n -> R^m at x along direction v
inline Vec<double> central_difference(const std::function<Vec<double>(const Vec<double>&)>& f, const Vec<double>& x,
                                      const Vec<double>& v, double h = 1e-5) {
  return (f(x + h * v) - f(x - h * v)) / (2 * h);
}

// |a - b| <= tol * max(1, |b|) entrywise
inline bool rel_close(const Vec<double>& a, const Vec<double>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (std::fabs(a[i] - b[i]) > tol * std::max(1.0, std::fabs(b[i]))) return false;
  return true;
}

}  // namespace oracle
