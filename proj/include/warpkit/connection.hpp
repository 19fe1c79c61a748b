#pragma once

#include "warpkit/dvb.hpp"
#include "warpkit/jet.hpp"
#include "warpkit/tvb.hpp"

namespace warpkit {

// Connection coefficients on A = R^p x R^q: gamma(x) has p*q*q entries,
// gamma[k][i][j] at k*q*q + i*q + j, and Gamma(x)(v) = sum_k v_k gamma[k].
template <class S>
struct Connection {
  int p = 0, q = 0;
  SmoothMap<S> gamma;  // R^p -> R^{p q q}

  static Connection flat(int p, int q) {
    return {p, q, {p, p * q * q, [p, q](const JetPoint<S>& x) {
                     JetPoint<S> r;
                     for (int i = 0; i < p * q * q; ++i) r.comps.emplace_back(x.order(), S(0));
                     return r;
                   }}};
  }
};

template <class S>
void check_connection(const Connection<S>& c) {
  if (c.gamma.domDim != c.p || c.gamma.codDim != c.p * c.q * c.q)
    throw PreconditionError("connection: gamma has the wrong shape");
}

// Gamma(x)(v) a on jets
template <class S>
JetPoint<S> gamma_apply(const Connection<S>& c, const JetPoint<S>& x, const JetPoint<S>& v, const JetPoint<S>& a) {
  if (static_cast<int>(v.dim()) != c.p || static_cast<int>(a.dim()) != c.q)
    throw PreconditionError("gamma_apply: dimension mismatch");
  JetPoint<S> G = c.gamma(x);
  JetPoint<S> r;
  const int q = c.q;
  for (int i = 0; i < q; ++i) {
    JetScalar<S> acc(x.order(), S(0));
    for (int k = 0; k < c.p; ++k)
      for (int j = 0; j < q; ++j) acc += v[k] * G[k * q * q + i * q + j] * a[j];
    r.comps.push_back(acc);
  }
  return r;
}

template <class S>
Mat<S> gamma_matrix(const Connection<S>& c, const Vec<S>& x, const Vec<S>& v) {
  Vec<S> G = c.gamma.at(x);
  Mat<S> M = Mat<S>::Zero(c.q, c.q);
  for (int k = 0; k < c.p; ++k)
    for (int i = 0; i < c.q; ++i)
      for (int j = 0; j < c.q; ++j) M(i, j) += v[k] * G[k * c.q * c.q + i * c.q + j];
  return M;
}

// Df(x).V(x) on jets, through a free jet direction
template <class S>
JetPoint<S> directional(const SmoothMap<S>& f, const VectorFieldChart<S>& V, const JetPoint<S>& x) {
  check_jets(x);
  const int k = x.order();
  int d = 0;
  for (int dir = 1; dir <= kMaxJetOrder && !d; ++dir)
    if (!x.uses(dir)) d = dir;
  if (!d) throw PreconditionError("directional: no free jet direction");
  JetPoint<S> xw = x.with_order(std::max(k, d));
  JetPoint<S> val = f(section_lift(V, xw, d));
  return split(val, d).second.with_order(k);
}

template <class S>
SmoothMap<S> directional_map(const SmoothMap<S>& f, const VectorFieldChart<S>& V) {
  return {f.domDim, f.codDim, [f, V](const JetPoint<S>& x) { return directional(f, V, x); }};
}

// [X,Y] = DY.X - DX.Y as a jet-evaluable field
template <class S>
VectorFieldChart<S> bracket_field(const VectorFieldChart<S>& X, const VectorFieldChart<S>& Y) {
  return {X.domDim, X.domDim, [X, Y](const JetPoint<S>& x) { return directional(Y, X, x) - directional(X, Y, x); }};
}

// nabla_Z mu = Dmu.Z + Gamma(Z) mu
template <class S>
SmoothMap<S> covariant_derivative_map(const Connection<S>& c, const VectorFieldChart<S>& Z, const SmoothMap<S>& mu) {
  check_connection(c);
  if (Z.domDim != c.p || mu.domDim != c.p || mu.codDim != c.q)
    throw PreconditionError("covariant_derivative: dimension mismatch");
  return {c.p, c.q, [c, Z, mu](const JetPoint<S>& x) {
            return directional(mu, Z, x) + gamma_apply(c, x, Z(x), mu(x));
          }};
}

template <class S>
Vec<S> covariant_derivative(const Connection<S>& c, const VectorFieldChart<S>& Z, const SmoothMap<S>& mu,
                            const Vec<S>& m) {
  return covariant_derivative_map(c, Z, mu).at(m);
}

// Z^H(x, a) = (Z(x), -Gamma(x)(Z(x)) a)
template <class S>
VectorFieldChart<S> horizontal_lift(const Connection<S>& c, const VectorFieldChart<S>& Z) {
  check_connection(c);
  if (Z.domDim != c.p) throw PreconditionError("horizontal_lift: dimension mismatch");
  const int p = c.p;
  return {p + c.q, p + c.q, [c, Z, p](const JetPoint<S>& xa) {
            auto [x, a] = halves(xa, p);
            JetPoint<S> z = Z(x);
            JetPoint<S> g = gamma_apply(c, x, z, a);
            for (auto& comp : g.comps) comp = -comp;
            return concat(z, g);
          }};
}

// T(mu) : TM -> TA on jets
template <class S>
JetPoint<S> section_jet(const SmoothMap<S>& mu, const JetPoint<S>& x) {
  return concat(x, mu(x));
}

template <class S>
struct WarpCheck {
  Vec<S> viaWarp, expected;
  double residual;
};

// T(mu)(Z(m)) - Z^H(mu(m)) as a core element of TA against nabla_Z mu
template <class S>
WarpCheck<S> connection_warp_check(const Connection<S>& c, const VectorFieldChart<S>& Z, const SmoothMap<S>& mu,
                                   const Vec<S>& m) {
  JetPoint<S> zm = section_lift(Z, JetPoint<S>::constant(1, m), 1);
  JetPoint<S> lhs = section_jet(mu, zm);
  JetPoint<S> mum = concat(JetPoint<S>::constant(1, m), JetPoint<S>::constant(1, mu.at(m)));
  JetPoint<S> rhs = section_lift(horizontal_lift(c, Z), mum, 1);
  auto as_dvb = [&](const JetPoint<S>& t) {
    auto [x, a] = halves(t, c.p);
    return DvbElement<S>{a.coeff(0), x.coeff(1), a.coeff(1)};
  };
  WarpCheck<S> out;
  out.viaWarp = dvb_core_diff(as_dvb(lhs), as_dvb(rhs));
  out.expected = covariant_derivative(c, Z, mu, m);
  out.residual = max_abs<S>(out.viaWarp - out.expected);
  return out;
}

// ---------------------------------------------------------------------------
// T^2 A: an order-2 jet of (x, a); direction 1 is cube direction 1, direction 2
// is cube direction 3, and the A-fibre is cube direction 2.

inline TvbShape t2a_shape(int p, int q) { return {{p, q, p, q, p, q, q}}; }

template <class S>
TvbElement<S> t2a_to_tvb(const JetPoint<S>& v, int p) {
  if (v.order() != 2) throw PreconditionError("t2a_to_tvb: expects an order-2 jet");
  auto [x, a] = halves(v, p);
  TvbElement<S> e;
  e[E1] = x.coeff(1);
  e[E2] = a.coeff(0);
  e[E3] = x.coeff(2);
  e[E12] = a.coeff(1);
  e[E13] = x.coeff(3);
  e[E23] = a.coeff(2);
  e[E123] = a.coeff(3);
  return e;
}

template <class S>
JetPoint<S> tvb_to_t2a(const Vec<S>& m, const TvbElement<S>& e) {
  const int p = static_cast<int>(m.size()), q = static_cast<int>(e[E2].size());
  JetPoint<S> x = JetPoint<S>::constant(2, m), a = JetPoint<S>::constant(2, zeros<S>(q));
  (void)p;
  x.set_coeff(1, e[E1]);
  a.set_coeff(0, e[E2]);
  x.set_coeff(2, e[E3]);
  a.set_coeff(1, e[E12]);
  x.set_coeff(3, e[E13]);
  a.set_coeff(2, e[E23]);
  a.set_coeff(3, e[E123]);
  return concat(x, a);
}

// element (x, a; xdot, adot) of TA
template <class S>
struct TaElement {
  Vec<S> x, a, xdot, adot;
};

// core embeddings of TA into T^2 A
template <class S>
JetPoint<S> bar_B(const TaElement<S>& t) {
  TvbElement<S> e = tvb_zero<S>(t2a_shape(t.x.size(), t.a.size()));
  e[E1] = t.xdot;
  e[E23] = t.a;
  e[E123] = t.adot;
  return tvb_to_t2a(t.x, e);
}
template <class S>
JetPoint<S> bar_L(const TaElement<S>& t) {
  TvbElement<S> e = tvb_zero<S>(t2a_shape(t.x.size(), t.a.size()));
  e[E2] = t.a;
  e[E13] = t.xdot;
  e[E123] = t.adot;
  return tvb_to_t2a(t.x, e);
}
template <class S>
JetPoint<S> bar_U(const TaElement<S>& t) {
  TvbElement<S> e = tvb_zero<S>(t2a_shape(t.x.size(), t.a.size()));
  e[E3] = t.xdot;
  e[E12] = t.a;
  e[E123] = t.adot;
  return tvb_to_t2a(t.x, e);
}

template <class S>
JetPoint<S> J_A(const JetPoint<S>& v) {
  return involution(1, 2, v);
}

// The grid (T(X^H); X^H, T(X); X), (T^2(mu); T(mu), T(mu); mu), (Z~^H; Z^H, Z~; Z).
template <class S>
struct T2aGrid {
  Connection<S> conn;
  VectorFieldChart<S> X, Z;
  SmoothMap<S> mu;
  VectorFieldChart<S> XH, ZH, Zt, ZHt;

  T2aGrid(Connection<S> c, VectorFieldChart<S> x, VectorFieldChart<S> z, SmoothMap<S> m)
      : conn(std::move(c)), X(std::move(x)), Z(std::move(z)), mu(std::move(m)) {
    check_connection(conn);
    if (X.domDim != conn.p || Z.domDim != conn.p || mu.domDim != conn.p || mu.codDim != conn.q)
      throw PreconditionError("T2A grid: dimension mismatch");
    XH = horizontal_lift(conn, X);
    ZH = horizontal_lift(conn, Z);
    Zt = complete_lift(Z);
    ZHt = complete_lift(ZH);
  }

  int p() const { return conn.p; }
  int q() const { return conn.q; }
  TvbShape shape() const { return t2a_shape(p(), q()); }

  // points of E1 = TM(b), E2 = A, E3 = TM(c)
  JetPoint<S> e1_point(const Vec<S>& m, const Vec<S>& v) const {
    JetPoint<S> x = JetPoint<S>::constant(2, m);
    x.set_coeff(1, v);
    return x;
  }
  JetPoint<S> e2_point(const Vec<S>& m, const Vec<S>& a) const {
    return concat(JetPoint<S>::constant(2, m), JetPoint<S>::constant(2, a));
  }
  JetPoint<S> e3_point(const Vec<S>& m, const Vec<S>& v) const {
    JetPoint<S> x = JetPoint<S>::constant(2, m);
    x.set_coeff(2, v);
    return x;
  }

  JetPoint<S> Y1(const JetPoint<S>& e1) const { return section_jet(mu, e1); }        // T(mu)
  JetPoint<S> Y3(const JetPoint<S>& e3) const { return section_jet(mu, e3); }        // T(mu)
  JetPoint<S> X2(const JetPoint<S>& e2) const { return section_lift(XH, e2, 1); }    // X^H
  JetPoint<S> X3(const JetPoint<S>& e3) const { return section_lift(X, e3, 1); }     // T(X)
  JetPoint<S> Z1(const JetPoint<S>& e1) const { return lift_on_tm(Zt, e1, 1, 2); }   // Z~
  JetPoint<S> Z2(const JetPoint<S>& e2) const { return section_lift(ZH, e2, 2); }    // Z^H

  JetPoint<S> X23(const JetPoint<S>& f) const { return section_lift(XH, f, 1); }     // T(X^H)
  JetPoint<S> Y13(const JetPoint<S>& f) const { return section_jet(mu, f); }         // T^2(mu)
  JetPoint<S> Z12(const JetPoint<S>& f) const { return lift_on_tm(ZHt, f, 1, 2); }   // Z~^H

  TvbElement<S> tvb(const JetPoint<S>& v) const { return t2a_to_tvb(v, p()); }

  Routes<S> routes_at(const Vec<S>& m) const {
    JetPoint<S> x = e1_point(m, X.at(m)), y = e2_point(m, mu.at(m)), z = e3_point(m, Z.at(m));
    Routes<S> r;
    r.shape = shape();
    r.ZYX = tvb(Z12(Y1(x)));
    r.YZX = tvb(Y13(Z1(x)));
    r.XZY = tvb(X23(Z2(y)));
    r.ZXY = tvb(Z12(X2(y)));
    r.YXZ = tvb(Y13(X3(z)));
    r.XYZ = tvb(X23(Y3(z)));
    return r;
  }

  // upper-face warps at arbitrary points of the edges
  CoreDvbElement<S> warp_back(const Vec<S>& m, const Vec<S>& v) const {
    JetPoint<S> e = e1_point(m, v);
    return two_face_diff(TwoFace::RD, tvb(Z12(Y1(e))), tvb(Y13(Z1(e))));
  }
  CoreDvbElement<S> warp_left(const Vec<S>& m, const Vec<S>& a) const {
    JetPoint<S> e = e2_point(m, a);
    return two_face_diff(TwoFace::FD, tvb(X23(Z2(e))), tvb(Z12(X2(e))));
  }
  CoreDvbElement<S> warp_up(const Vec<S>& m, const Vec<S>& v) const {
    JetPoint<S> e = e3_point(m, v);
    return two_face_diff(TwoFace::FR, tvb(Y13(X3(e))), tvb(X23(Y3(e))));
  }
};

// The six face warps, intrinsic and closed form side by side.
template <class S>
struct FaceWarpsT2A {
  Vec<S> down, front, right;
  CoreDvbElement<S> back, left, up;
};

template <class S>
FaceWarpsT2A<S> face_warps_T2A(const T2aGrid<S>& g, const Vec<S>& m, const Vec<S>& vBack, const Vec<S>& aLeft,
                               const Vec<S>& vUp) {
  GridData<S> d = grid_data(g.routes_at(m));
  return {d.w12, d.w23, d.w13, g.warp_back(m, vBack), g.warp_left(m, aLeft), g.warp_up(m, vUp)};
}

// Down nabla_X mu, Front -nabla_Z mu, Right [Z,X], Back -T(nabla_Z mu),
// Left [Z^H, X^H], Up T(nabla_X mu)
template <class S>
FaceWarpsT2A<S> face_warps_T2A_closed(const T2aGrid<S>& g, const Vec<S>& m, const Vec<S>& vBack,
                                      const Vec<S>& aLeft, const Vec<S>& vUp) {
  SmoothMap<S> nX = covariant_derivative_map(g.conn, g.X, g.mu), nZ = covariant_derivative_map(g.conn, g.Z, g.mu);
  VectorFieldChart<S> ZX = bracket_field(g.Z, g.X);
  auto tangent = [](const SmoothMap<S>& f, const Vec<S>& m0, const Vec<S>& v) {
    JetPoint<S> x = JetPoint<S>::constant(1, m0);
    x.set_coeff(1, v);
    return f(x);
  };
  FaceWarpsT2A<S> out;
  out.down = nX.at(m);
  out.front = -nZ.at(m);
  out.right = ZX.at(m);
  JetPoint<S> tb = tangent(nZ, m, vBack);
  out.back = {CorePair::BF, vBack, -tb.coeff(0), -tb.coeff(1)};
  JetPoint<S> tu = tangent(nX, m, vUp);
  out.up = {CorePair::UD, vUp, tu.coeff(0), tu.coeff(1)};
  VectorFieldChart<S> ZHXH = bracket_field(g.ZH, g.XH);
  auto [bx, ba] = halves(ZHXH(concat(JetPoint<S>::constant(0, m), JetPoint<S>::constant(0, aLeft))), g.p());
  out.left = {CorePair::LR, aLeft, bx.coeff(0), ba.coeff(0)};
  return out;
}

// R(Z,X) = (D_X Gamma)(Z) - (D_Z Gamma)(X) + Gamma(X)Gamma(Z) - Gamma(Z)Gamma(X)
template <class S>
Mat<S> curvature_tensor(const Connection<S>& c, const VectorFieldChart<S>& Z, const VectorFieldChart<S>& X,
                        const Vec<S>& m) {
  check_connection(c);
  const Vec<S> z = Z.at(m), x = X.at(m);
  auto dgamma = [&](const Vec<S>& along, const Vec<S>& dir) {
    JetPoint<S> pt = JetPoint<S>::constant(1, m);
    pt.set_coeff(1, along);
    Vec<S> dG = c.gamma(pt).coeff(1);
    Mat<S> M = Mat<S>::Zero(c.q, c.q);
    for (int k = 0; k < c.p; ++k)
      for (int i = 0; i < c.q; ++i)
        for (int j = 0; j < c.q; ++j) M(i, j) += dir[k] * dG[k * c.q * c.q + i * c.q + j];
    return M;
  };
  Mat<S> GX = gamma_matrix(c, m, x), GZ = gamma_matrix(c, m, z);
  return Mat<S>(dgamma(x, z) - dgamma(z, x) + GX * GZ - GZ * GX);
}

// The Left-Right ultrawarp, intrinsically and through the bolt decomposition.
template <class S>
struct LrUltrawarp {
  Vec<S> intrinsic;  // u2 of the T^2 A grid
  Vec<S> viaBolt;    // flipped warp of (T(mu), [Z,X]^H) + warp of the bolt
  Vec<S> closed;     // -nabla_[Z,X] mu + R(Z,X) mu
  Mat<S> fiberPart;  // psi of [Z^H, X^H] over [Z,X](m)
  Mat<S> bolt;       // fiberPart + Gamma([Z,X])
  Mat<S> curvature;  // R(Z,X), to compare with the bolt
  Mat<S> recombinationDefect;  // ([Z,X]^H + bolt) - [Z^H,X^H], fiber part
  Vec<S> additivityDefect;     // warp of the sum minus the sum of warps
  std::vector<IdentityCheck> checks;
};

template <class S>
LrUltrawarp<S> lr_ultrawarp(const T2aGrid<S>& g, const Vec<S>& m) {
  LrUltrawarp<S> out;
  const int p = g.p(), q = g.q();
  UltrawarpResult<S> uw = ultrawarp_checked(g.routes_at(m), CorePair::LR);
  out.checks = uw.checks;
  out.intrinsic = uw.u;

  // [Z^H, X^H] over mu(m) read off the Left face, column by column
  Vec<S> zx = bracket_field(g.Z, g.X).at(m);
  out.fiberPart = Mat<S>::Zero(q, q);
  CoreDvbElement<S> at0 = g.warp_left(m, zeros<S>(q));
  bool lin = all_zero(at0.u) && vec_eq(at0.w, zx);
  for (int j = 0; j < q; ++j) {
    Vec<S> e = zeros<S>(q);
    e[j] = S(1);
    CoreDvbElement<S> lw = g.warp_left(m, e);
    lin = lin && vec_eq(lw.w, zx);
    out.fiberPart.col(j) = lw.u;
  }
  out.checks.push_back({"Left face warp is linear over [Z,X]", lin, lin ? "" : "not linear"});

  // the grid in the core double vector bundle (A, TM; A): xi = T(mu), eta = [Z^H, X^H]
  Mat<S> Dmu(q, p);
  for (int j = 0; j < p; ++j) {
    Vec<S> e = zeros<S>(p);
    e[j] = S(1);
    JetPoint<S> x = JetPoint<S>::constant(1, m);
    x.set_coeff(1, e);
    Dmu.col(j) = g.mu(x).coeff(1);
  }
  const DvbShape sh{q, p, q};
  LinearSectionH<S> xi{g.mu.at(m), Dmu};
  LinearSectionV<S> eta{zx, out.fiberPart};
  LinearSectionV<S> etaH{zx, Mat<S>(-gamma_matrix(g.conn, m, zx))};
  out.bolt = out.fiberPart - etaH.psi;
  BoltSection<S> bolt{out.bolt};
  LinearSectionV<S> recombined = add_bolt(etaH, bolt);
  out.recombinationDefect = Mat<S>(recombined.psi - eta.psi);
  Vec<S> whole = warp2(Grid2<S>{sh, xi, eta});
  Vec<S> parts = Vec<S>(warp2(Grid2<S>{sh, xi, etaH}) + warp2_bolt(sh, xi, bolt));
  out.additivityDefect = Vec<S>(whole - parts);
  // orientation of the core pair: the ultrawarp takes the [Z^H,X^H] route first
  out.viaBolt = -parts;
  out.curvature = curvature_tensor(g.conn, g.Z, g.X, m);
  const Mat<S>& R = out.curvature;
  Vec<S> mum = g.mu.at(m);
  out.closed = Vec<S>(-covariant_derivative(g.conn, bracket_field(g.Z, g.X), g.mu, m) + R * mum);
  return out;
}

// R(Z,X)mu forced by the ultrawarp sum: nabla_[Z,X] mu - u1 - u3
template <class S>
Vec<S> curvature_from_warps(const T2aGrid<S>& g, const Vec<S>& m) {
  WarpTheoremResult<S> w = warp_theorem(g.routes_at(m));
  if (!all_ok(w.checks)) throw IdentityFailure(first_failure(w.checks));
  return covariant_derivative(g.conn, bracket_field(g.Z, g.X), g.mu, m) - w.u.u1 - w.u.u3;
}

template <class S>
struct T2aTheoremResult {
  UltrawarpTriple<S> u;         // from the grid
  UltrawarpTriple<S> expected;  // -nabla_X nabla_Z mu, -nabla_[Z,X] mu + R mu, nabla_Z nabla_X mu
  Vec<S> residual;
  std::vector<IdentityCheck> checks;
};

template <class S>
T2aTheoremResult<S> t2a_warp_theorem(const T2aGrid<S>& g, const Vec<S>& m) {
  WarpTheoremResult<S> w = warp_theorem(g.routes_at(m));
  T2aTheoremResult<S> out;
  out.u = w.u;
  out.residual = w.residual;
  out.checks = w.checks;
  SmoothMap<S> nX = covariant_derivative_map(g.conn, g.X, g.mu), nZ = covariant_derivative_map(g.conn, g.Z, g.mu);
  out.expected.u1 = -covariant_derivative(g.conn, g.X, nZ, m);
  out.expected.u2 = Vec<S>(-covariant_derivative(g.conn, bracket_field(g.Z, g.X), g.mu, m) +
                           curvature_tensor(g.conn, g.Z, g.X, m) * g.mu.at(m));
  out.expected.u3 = covariant_derivative(g.conn, g.Z, nX, m);
  return out;
}

}  // namespace warpkit
