#pragma once

#include "warpkit/scalar.hpp"

namespace warpkit {

// D = A x B x C over a fixed base point; +_A fixes a, +_B fixes b.
struct DvbShape {
  Eigen::Index dimA = 0, dimB = 0, dimC = 0;
  bool operator==(const DvbShape&) const = default;
};

template <class S>
struct DvbElement {
  Vec<S> a, b, c;
};

enum class DvbAxis { overA, overB };

inline const char* axis_name(DvbAxis ax) { return ax == DvbAxis::overA ? "overA" : "overB"; }

template <class S>
DvbShape shape_of(const DvbElement<S>& d) {
  return {d.a.size(), d.b.size(), d.c.size()};
}

template <class S>
bool dvb_equal(const DvbElement<S>& x, const DvbElement<S>& y) {
  return vec_eq(x.a, y.a) && vec_eq(x.b, y.b) && vec_eq(x.c, y.c);
}

template <class S>
DvbElement<S> dvb_add(DvbAxis ax, const DvbElement<S>& d, const DvbElement<S>& e) {
  if (!(shape_of(d) == shape_of(e))) throw PreconditionError("dvb_add: shape mismatch");
  if (ax == DvbAxis::overA) {
    if (!vec_eq(d.a, e.a)) throw PreconditionError("dvb_add overA: projections to A differ");
    return {d.a, d.b + e.b, d.c + e.c};
  }
  if (!vec_eq(d.b, e.b)) throw PreconditionError("dvb_add overB: projections to B differ");
  return {d.a + e.a, d.b, d.c + e.c};
}

template <class S>
DvbElement<S> dvb_scalar(DvbAxis ax, const S& t, const DvbElement<S>& d) {
  if (ax == DvbAxis::overA) return {d.a, t * d.b, t * d.c};
  return {t * d.a, d.b, t * d.c};
}

template <class S>
DvbElement<S> dvb_sub(DvbAxis ax, const DvbElement<S>& d, const DvbElement<S>& e) {
  return dvb_add(ax, d, dvb_scalar(ax, S(-1), e));
}

// zero of D -> A over a, and of D -> B over b
template <class S>
DvbElement<S> dvb_zero_overA(const DvbShape& sh, const Vec<S>& a) {
  return {a, zeros<S>(sh.dimB), zeros<S>(sh.dimC)};
}
template <class S>
DvbElement<S> dvb_zero_overB(const DvbShape& sh, const Vec<S>& b) {
  return {zeros<S>(sh.dimA), b, zeros<S>(sh.dimC)};
}
template <class S>
DvbElement<S> dvb_core_elem(const DvbShape& sh, const Vec<S>& c) {
  return {zeros<S>(sh.dimA), zeros<S>(sh.dimB), c};
}

// The unique c with d = e +_A (c +_B 0~^A_a) and d = e +_B (c +_A 0~^B_b).
template <class S>
Vec<S> dvb_core_diff(const DvbElement<S>& d, const DvbElement<S>& e) {
  if (!(shape_of(d) == shape_of(e))) throw PreconditionError("dvb_core_diff: shape mismatch");
  if (!vec_eq(d.a, e.a) || !vec_eq(d.b, e.b))
    throw PreconditionError("dvb_core_diff: outlines differ");
  const DvbShape sh = shape_of(d);
  Vec<S> c = d.c - e.c;
  DvbElement<S> core = dvb_core_elem(sh, c);
  DvbElement<S> viaA =
      dvb_add(DvbAxis::overA, e, dvb_add(DvbAxis::overB, core, dvb_zero_overA(sh, d.a)));
  DvbElement<S> viaB =
      dvb_add(DvbAxis::overB, e, dvb_add(DvbAxis::overA, core, dvb_zero_overB(sh, d.b)));
  if (!dvb_equal(viaA, d) || !dvb_equal(viaB, d))
    throw std::logic_error("dvb_core_diff: reconstruction failed");
  return c;
}

// section of D -> B over X : M -> A, b |-> (X, b, phi b)
template <class S>
struct LinearSectionH {
  Vec<S> X;
  Mat<S> phi;  // dimB -> dimC
  DvbElement<S> operator()(const Vec<S>& b) const { return {X, b, lin_apply(phi, b)}; }
};

// section of D -> A over Y : M -> B, a |-> (a, Y, psi a)
template <class S>
struct LinearSectionV {
  Vec<S> Y;
  Mat<S> psi;  // dimA -> dimC
  DvbElement<S> operator()(const Vec<S>& a) const { return {a, Y, lin_apply(psi, a)}; }
};

// linear section of D -> A over the zero of B
template <class S>
struct BoltSection {
  Mat<S> phiBolt;  // dimA -> dimC
  DvbElement<S> eval(const DvbShape& sh, const Vec<S>& a) const {
    return {a, zeros<S>(sh.dimB), lin_apply(phiBolt, a)};
  }
};

template <class S>
struct Grid2 {
  DvbShape shape;
  LinearSectionH<S> xi;
  LinearSectionV<S> eta;
};

template <class S>
void check_grid2(const Grid2<S>& g) {
  const DvbShape& sh = g.shape;
  if (g.xi.X.size() != sh.dimA || g.xi.phi.rows() != sh.dimC || g.xi.phi.cols() != sh.dimB ||
      g.eta.Y.size() != sh.dimB || g.eta.psi.rows() != sh.dimC || g.eta.psi.cols() != sh.dimA)
    throw PreconditionError("grid: section shapes disagree with the bundle shape");
}

// core difference of xi(Y(m)) and eta(X(m)); positive sign on xi o Y
template <class S>
Vec<S> warp2(const Grid2<S>& g) {
  check_grid2(g);
  return dvb_core_diff(g.xi(g.eta.Y), g.eta(g.xi.X));
}

template <class S>
Vec<S> warp2_closed(const Grid2<S>& g) {
  check_grid2(g);
  return lin_apply(g.xi.phi, g.eta.Y) - lin_apply(g.eta.psi, g.xi.X);
}

// the same grid read eta-first
template <class S>
Vec<S> warp2_reversed(const Grid2<S>& g) {
  check_grid2(g);
  return dvb_core_diff(g.eta(g.xi.X), g.xi(g.eta.Y));
}

template <class S>
Vec<S> warp2_bolt(const DvbShape& sh, const LinearSectionH<S>& xi, const BoltSection<S>& bolt) {
  if (xi.X.size() != sh.dimA || bolt.phiBolt.rows() != sh.dimC || bolt.phiBolt.cols() != sh.dimA)
    throw PreconditionError("warp2_bolt: shape mismatch");
  return -lin_apply(bolt.phiBolt, xi.X);
}

// the bolt as a vertical linear section over the zero of B
template <class S>
LinearSectionV<S> bolt_as_vertical(const DvbShape& sh, const BoltSection<S>& bolt) {
  return {zeros<S>(sh.dimB), bolt.phiBolt};
}

// eta +_A bolt : a |-> eta(a) +_A bolt(a)
template <class S>
LinearSectionV<S> add_bolt(const LinearSectionV<S>& eta, const BoltSection<S>& bolt) {
  return {eta.Y, eta.psi + bolt.phiBolt};
}

template <class S>
Grid2<S> rand_grid2(const DvbShape& sh, Rng& rng) {
  Grid2<S> g;
  g.shape = sh;
  g.xi = {rand_vec<S>(sh.dimA, rng), rand_lin<S>(sh.dimB, sh.dimC, rng)};
  g.eta = {rand_vec<S>(sh.dimB, rng), rand_lin<S>(sh.dimA, sh.dimC, rng)};
  return g;
}

template <class S>
DvbElement<S> rand_dvb_element(const DvbShape& sh, Rng& rng) {
  return {rand_vec<S>(sh.dimA, rng), rand_vec<S>(sh.dimB, rng), rand_vec<S>(sh.dimC, rng)};
}

}  // namespace warpkit
