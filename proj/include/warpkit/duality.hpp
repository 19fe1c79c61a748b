#pragma once

#include "warpkit/connection.hpp"
#include "warpkit/dvb.hpp"
#include "warpkit/jet.hpp"

namespace warpkit {

// Phi in the dual of D over A, outline (a, kappa)
template <class S>
struct DualAElement {
  Vec<S> a, kappa, beta;
};

// Psi in the dual of D over B, outline (kappa, b)
template <class S>
struct DualBElement {
  Vec<S> b, kappa, alpha;
};

// element of the dual of (D*B -> C*) over kappa; pairs with Psi as beta'.b + alpha.a'
template <class S>
struct DualBCElement {
  Vec<S> kappa, a, beta;
};

// element of the dual of (D*A -> C*) over kappa; pairs with Phi as beta.b' + alpha'.a
template <class S>
struct DualACElement {
  Vec<S> kappa, b, alpha;
};

template <class S>
S pair_A(const DualAElement<S>& Phi, const DvbElement<S>& d) {
  if (!vec_eq(Phi.a, d.a)) throw PreconditionError("pair_A: element does not lie over Phi's point of A");
  return dot(Phi.beta, d.b) + dot(Phi.kappa, d.c);
}

template <class S>
S pair_B(const DualBElement<S>& Psi, const DvbElement<S>& d) {
  if (!vec_eq(Psi.b, d.b)) throw PreconditionError("pair_B: element does not lie over Psi's point of B");
  return dot(Psi.alpha, d.a) + dot(Psi.kappa, d.c);
}

template <class S>
S pair_duals(const DualAElement<S>& Phi, const DualBElement<S>& Psi) {
  if (!vec_eq(Phi.kappa, Psi.kappa)) throw PreconditionError("pair_duals: kappa mismatch");
  return dot(Phi.beta, Psi.b) - dot(Psi.alpha, Phi.a);
}

// the same value through any d with outline (Phi.a, Psi.b)
template <class S>
S pair_duals_via(const DualAElement<S>& Phi, const DualBElement<S>& Psi, const Vec<S>& c) {
  DvbElement<S> d{Phi.a, Psi.b, c};
  return pair_A(Phi, d) - pair_B(Psi, d);
}

template <class S>
S pair_C(const DualBCElement<S>& t, const DualBElement<S>& Psi) {
  if (!vec_eq(t.kappa, Psi.kappa)) throw PreconditionError("pairing over C*: kappa mismatch");
  return dot(t.beta, Psi.b) + dot(Psi.alpha, t.a);
}

template <class S>
S pair_C(const DualACElement<S>& t, const DualAElement<S>& Phi) {
  if (!vec_eq(t.kappa, Phi.kappa)) throw PreconditionError("pairing over C*: kappa mismatch");
  return dot(Phi.beta, t.b) + dot(t.alpha, Phi.a);
}

template <class S>
DualBCElement<S> iso_Z_A(const DualAElement<S>& Phi) {
  return {Phi.kappa, -Phi.a, Phi.beta};
}
template <class S>
DualAElement<S> iso_Z_A_inv(const DualBCElement<S>& t) {
  return {-t.a, t.kappa, t.beta};
}
template <class S>
DualACElement<S> iso_Z_B(const DualBElement<S>& Psi) {
  return {Psi.kappa, Psi.b, -Psi.alpha};
}
template <class S>
DualBElement<S> iso_Z_B_inv(const DualACElement<S>& t) {
  return {t.b, t.kappa, -t.alpha};
}

// l_eta(Phi) = <Phi, eta(a)>_A and l_xi(Psi) = <Psi, xi(b)>_B
template <class S>
S ell(const LinearSectionV<S>& eta, const DualAElement<S>& Phi) {
  return pair_A(Phi, eta(Phi.a));
}
template <class S>
S ell(const LinearSectionH<S>& xi, const DualBElement<S>& Psi) {
  return pair_B(Psi, xi(Psi.b));
}

template <class S>
DualACElement<S> sqcap_lift(const LinearSectionV<S>& eta, const Vec<S>& kappa) {
  return {kappa, eta.Y, lin_apply(Mat<S>(eta.psi.transpose()), kappa)};
}
template <class S>
DualBCElement<S> sqcap_lift(const LinearSectionH<S>& xi, const Vec<S>& kappa) {
  return {kappa, xi.X, lin_apply(Mat<S>(xi.phi.transpose()), kappa)};
}

template <class S>
struct PairingWarp {
  S viaZA, viaZB, ellWarp, orthogonality;
};

template <class S>
PairingWarp<S> warp_via_pairing(const Grid2<S>& g, const Vec<S>& kappa) {
  check_grid2(g);
  if (kappa.size() != g.shape.dimC) throw PreconditionError("warp_via_pairing: kappa has the wrong dimension");
  DualBCElement<S> xs = sqcap_lift(g.xi, kappa);
  DualACElement<S> es = sqcap_lift(g.eta, kappa);
  PairingWarp<S> out;
  out.viaZA = pair_C(es, iso_Z_A_inv(xs));
  DualBElement<S> psi = iso_Z_B_inv(es);
  out.viaZB = pair_C(xs, psi);
  out.orthogonality = pair_B(psi, g.eta(g.xi.X));
  out.ellWarp = dot(kappa, warp2(g));
  return out;
}

// ---------------------------------------------------------------------------
// Chart-level checks on cotangent bundles.

// gradient of f : R^n -> R at x through jets
template <class S>
Vec<S> gradient(const SmoothMap<S>& f, const Vec<S>& x) {
  const int n = f.domDim;
  Vec<S> g(n);
  for (int i = 0; i < n; ++i) {
    JetPoint<S> pt = JetPoint<S>::constant(1, x);
    Vec<S> e = zeros<S>(n);
    e[i] = S(1);
    pt.set_coeff(1, e);
    g[i] = f(pt)[0][1];
  }
  return g;
}

// gradient as a jet-evaluable map, through a free direction
template <class S>
SmoothMap<S> gradient_map(const SmoothMap<S>& f) {
  const int n = f.domDim;
  return {n, n, [f, n](const JetPoint<S>& x) {
            JetPoint<S> r;
            for (int i = 0; i < n; ++i) {
              VectorFieldChart<S> ei{n, n, [n, i](const JetPoint<S>& y) {
                                       JetPoint<S> v;
                                       for (int k = 0; k < n; ++k) v.comps.emplace_back(y.order(), S(k == i ? 1 : 0));
                                       return v;
                                     }};
              r.comps.push_back(directional(f, ei, x)[0]);
            }
            return r;
          }};
}

// l_X(x, pi) = <pi, X(x)> on T*M
template <class S>
SmoothMap<S> linear_function(const VectorFieldChart<S>& X) {
  const int p = X.domDim;
  return {2 * p, 1, [X, p](const JetPoint<S>& xp) {
            auto [x, pi] = halves(xp, p);
            JetPoint<S> v = X(x);
            JetScalar<S> acc(xp.order(), S(0));
            for (int i = 0; i < p; ++i) acc += pi[i] * v[i];
            return JetPoint<S>({acc});
          }};
}

// H_f = (df/dpi, -df/dx)
template <class S>
VectorFieldChart<S> hamiltonian_field(const SmoothMap<S>& f) {
  const int n = f.domDim, p = n / 2;
  SmoothMap<S> grad = gradient_map(f);
  return {n, n, [grad, p](const JetPoint<S>& xp) {
            auto [gx, gpi] = halves(grad(xp), p);
            for (auto& c : gx.comps) c = -c;
            return concat(gpi, gx);
          }};
}

template <class S>
struct ScalarCheck {
  S value, expected;
  double residual;
};

// <dl_Y, H_{l_X}> against l_[X,Y] at (m, pi)
template <class S>
ScalarCheck<S> hamiltonian_bracket_check(const VectorFieldChart<S>& X, const VectorFieldChart<S>& Y, const Vec<S>& m,
                                         const Vec<S>& pi) {
  const int p = X.domDim;
  if (Y.domDim != p || m.size() != p || pi.size() != p) throw PreconditionError("hamiltonian check: dimension mismatch");
  Vec<S> pt(2 * p);
  pt << m, pi;
  VectorFieldChart<S> H = hamiltonian_field(linear_function(X));
  ScalarCheck<S> out;
  out.value = dot(gradient(linear_function(Y), pt), H.at(pt));
  out.expected = dot(pi, bracket_via_warp(X, Y, m));
  out.residual = std::fabs(ScalarTraits<S>::to_double(out.value - out.expected));
  return out;
}

// Gamma* = -Gamma^T on the dual bundle
template <class S>
Connection<S> dual_connection(const Connection<S>& c) {
  check_connection(c);
  const int p = c.p, q = c.q;
  SmoothMap<S> g = c.gamma;
  return {p, q, {p, p * q * q, [g, p, q](const JetPoint<S>& x) {
                   JetPoint<S> G = g(x), r = G;
                   for (int k = 0; k < p; ++k)
                     for (int i = 0; i < q; ++i)
                       for (int j = 0; j < q; ++j) r[k * q * q + i * q + j] = -G[k * q * q + j * q + i];
                   return r;
                 }}};
}

// <phi, mu> as a function on M
template <class S>
SmoothMap<S> pairing_function(const SmoothMap<S>& phi, const SmoothMap<S>& mu) {
  return {phi.domDim, 1, [phi, mu](const JetPoint<S>& x) {
            JetPoint<S> a = phi(x), b = mu(x);
            JetScalar<S> acc(x.order(), S(0));
            for (std::size_t i = 0; i < a.dim(); ++i) acc += a[i] * b[i];
            return JetPoint<S>({acc});
          }};
}

// <nabla*_X phi, mu> against X<phi, mu> - <phi, nabla_X mu>
template <class S>
ScalarCheck<S> dual_connection_check(const Connection<S>& c, const VectorFieldChart<S>& X, const SmoothMap<S>& phi,
                                     const SmoothMap<S>& mu, const Vec<S>& m) {
  ScalarCheck<S> out;
  out.value = dot(covariant_derivative(dual_connection(c), X, phi, m), mu.at(m));
  out.expected = directional(pairing_function(phi, mu), X, JetPoint<S>::constant(0, m))[0][0] -
                 dot(phi.at(m), covariant_derivative(c, X, mu, m));
  out.residual = std::fabs(ScalarTraits<S>::to_double(out.value - out.expected));
  return out;
}

// X^{H*}(l_mu) at phi over m against l_{nabla_X mu}(phi)
template <class S>
ScalarCheck<S> connection_pairing_check(const Connection<S>& c, const VectorFieldChart<S>& X, const SmoothMap<S>& mu,
                                        const Vec<S>& m, const Vec<S>& phi) {
  const int p = c.p, q = c.q;
  VectorFieldChart<S> XHs = horizontal_lift(dual_connection(c), X);
  // l_mu(x, phi) = <phi, mu(x)> on A*
  SmoothMap<S> lmu{p + q, 1, [mu, p](const JetPoint<S>& xphi) {
                     auto [x, f] = halves(xphi, p);
                     JetPoint<S> v = mu(x);
                     JetScalar<S> acc(xphi.order(), S(0));
                     for (std::size_t i = 0; i < f.dim(); ++i) acc += f[i] * v[i];
                     return JetPoint<S>({acc});
                   }};
  ScalarCheck<S> out;
  JetPoint<S> at = concat(JetPoint<S>::constant(0, m), JetPoint<S>::constant(0, phi));
  out.value = directional(lmu, XHs, at)[0][0];
  out.expected = dot(phi, covariant_derivative(c, X, mu, m));
  out.residual = std::fabs(ScalarTraits<S>::to_double(out.value - out.expected));
  return out;
}

// element of T*A* over (x, kappa) and of T*A over (x, a)
template <class S>
struct CotangentDualElement {
  Vec<S> x, kappa, thetaX, thetaKappa;
};
template <class S>
struct CotangentElement {
  Vec<S> x, a, xiX, xiA;
};
// tangent vectors to A and A*
template <class S>
struct TangentA {
  Vec<S> x, a, xdot, adot;
};

// reversal T*A* -> T*A
template <class S>
CotangentElement<S> reversal(const CotangentDualElement<S>& F) {
  return {F.x, F.thetaKappa, Vec<S>(-F.thetaX), F.kappa};
}

// <R(F), Y>_A - (<<Xc, Y>> - <F, Xc>_{A*}) for Y in TA over R(F)'s base point and
// Xc in TA* over kappa, both over the same tangent vector of M
template <class S>
S reversal_characterization_defect(const CotangentDualElement<S>& F, const TangentA<S>& Y, const TangentA<S>& Xc) {
  CotangentElement<S> RF = reversal(F);
  if (!vec_eq(Y.a, RF.a) || !vec_eq(Xc.a, F.kappa) || !vec_eq(Y.xdot, Xc.xdot))
    throw PreconditionError("reversal characterization: outlines do not match");
  S lhs = dot(RF.xiX, Y.xdot) + dot(RF.xiA, Y.adot);
  S tangentPairing = dot(Xc.adot, Y.a) + dot(Xc.a, Y.adot);
  S rhs = tangentPairing - (dot(F.thetaX, Xc.xdot) + dot(F.thetaKappa, Xc.adot));
  return lhs - rhs;
}

// warp of ((dl_phi, phi), (R o dl_mu, mu)) in T*A against -d<phi, mu>
template <class S>
struct CovectorWarpCheck {
  Vec<S> warp, expected;
  double residual;
};

template <class S>
CovectorWarpCheck<S> mx_warp_check(const SmoothMap<S>& phi, const SmoothMap<S>& mu, const Vec<S>& m) {
  const int p = mu.domDim, q = mu.codDim;
  if (phi.domDim != p || phi.codDim != q) throw PreconditionError("mx_warp_check: dimension mismatch");
  // l_mu on A*, l_phi on A
  auto ell_of = [p](const SmoothMap<S>& s) {
    return SmoothMap<S>{p + s.codDim, 1, [s, p](const JetPoint<S>& xv) {
                          auto [x, v] = halves(xv, p);
                          JetPoint<S> w = s(x);
                          JetScalar<S> acc(xv.order(), S(0));
                          for (std::size_t i = 0; i < v.dim(); ++i) acc += v[i] * w[i];
                          return JetPoint<S>({acc});
                        }};
  };
  Vec<S> phim = phi.at(m), mum = mu.at(m);
  Vec<S> pt(p + q);
  pt << m, phim;
  Vec<S> dlmu = gradient(ell_of(mu), pt);
  CotangentDualElement<S> F{m, phim, dlmu.head(p), dlmu.tail(q)};
  CotangentElement<S> xiY = reversal(F);
  pt << m, mum;
  Vec<S> dlphi = gradient(ell_of(phi), pt);
  CotangentElement<S> etaX{m, mum, dlphi.head(p), dlphi.tail(q)};
  // T*A as a double vector bundle: sides A and A*, core T*M
  auto as_dvb = [](const CotangentElement<S>& e) { return DvbElement<S>{e.a, e.xiA, e.xiX}; };
  CovectorWarpCheck<S> out;
  out.warp = dvb_core_diff(as_dvb(xiY), as_dvb(etaX));
  out.expected = -gradient(pairing_function(phi, mu), m);
  out.residual = max_abs<S>(out.warp - out.expected);
  return out;
}

}  // namespace warpkit
