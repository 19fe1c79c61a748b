#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "warpkit/duality.hpp"
#include "warpkit/polynomial.hpp"

using namespace warpkit;
using Q = Rational;

namespace {

Vec<Q> v1(int x) {
  Vec<Q> v(1);
  v[0] = x;
  return v;
}
Mat<Q> m1(int x) {
  Mat<Q> m(1, 1);
  m(0, 0) = x;
  return m;
}
Polynomial<Q> cst(int c) { return Polynomial<Q>::constant(1, Q(c)); }
Polynomial<Q> x0() { return Polynomial<Q>::variable(1, 0); }

template <class S>
bool near(const S& a, const S& b, double tol = 1e-9) {
  if constexpr (ScalarTraits<S>::exact) return a == b;
  else return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

template <class S>
S pairing_derivative(const PolyMap<S>& phi, const PolyMap<S>& mu, const Vec<S>& V, const Vec<S>& m) {
  S acc(0);
  for (int j = 0; j < static_cast<int>(m.size()); ++j)
    for (int i = 0; i < static_cast<int>(mu.comps.size()); ++i)
      acc += V[j] * (oracle::d1(phi, i, j, m) * oracle::value(mu, m)[i] + oracle::value(phi, m)[i] * oracle::d1(mu, i, j, m));
  return acc;
}

}  // namespace

TEST_CASE("pairing examples") {
  DualAElement<Q> Phi{v1(1), v1(2), v1(3)};
  CHECK(pair_A(Phi, DvbElement<Q>{v1(1), v1(5), v1(1)}) == Q(17));
  CHECK_THROWS_AS(pair_A(Phi, DvbElement<Q>{v1(2), v1(5), v1(1)}), PreconditionError);
  DualAElement<Q> P2{v1(2), v1(1), v1(3)};
  DualBElement<Q> Psi{v1(1), v1(1), v1(1)};
  CHECK(pair_duals(P2, Psi) == Q(1));
  for (int c : {-3, 0, 8}) CHECK(pair_duals_via(P2, Psi, v1(c)) == Q(1));
  CHECK_THROWS_AS(pair_duals(P2, DualBElement<Q>{v1(1), v1(2), v1(1)}), PreconditionError);
}

TEST_CASE("the Z isomorphisms") {
  DualAElement<Q> Phi{v1(5), v1(2), v1(3)};
  DualBCElement<Q> t = iso_Z_A(Phi);
  CHECK(t.a == v1(-5));
  CHECK(t.kappa == Phi.kappa);
  CHECK(t.beta == Phi.beta);
  DualAElement<Q> back = iso_Z_A_inv(t);
  CHECK((back.a == Phi.a && back.kappa == Phi.kappa && back.beta == Phi.beta));
  DualBElement<Q> Psi{v1(4), v1(2), v1(-1)};
  DualBElement<Q> bb = iso_Z_B_inv(iso_Z_B(Psi));
  CHECK((bb.b == Psi.b && bb.kappa == Psi.kappa && bb.alpha == Psi.alpha));
  CHECK(pair_C(iso_Z_A(Phi), Psi) == pair_duals(Phi, Psi));
  CHECK(pair_C(iso_Z_B(Psi), Phi) == pair_duals(Phi, Psi));
}

TEST_CASE("lifted sections pair as the linear functions") {
  LinearSectionV<Q> eta{v1(3), m1(7)};
  for (int a : {-2, 0, 3})
    for (int k : {1, 4})
      for (int b : {-1, 5}) {
        DualAElement<Q> Phi{v1(a), v1(k), v1(b)};
        // beta Y + (psi^T kappa) a
        CHECK(pair_C(sqcap_lift(eta, v1(k)), Phi) == Q(3 * b + 7 * a * k));
        CHECK(pair_C(sqcap_lift(eta, v1(k)), Phi) == ell(eta, Phi));
      }
}

TEST_CASE("warp through the pairing on the one-dimensional grid") {
  Grid2<Q> g{DvbShape{1, 1, 1}, {v1(2), m1(5)}, {v1(3), m1(7)}};
  PairingWarp<Q> pw = warp_via_pairing(g, v1(4));
  CHECK(pw.ellWarp == Q(4));
  CHECK(pw.viaZA == Q(4));
  CHECK(pw.viaZB == Q(4));
  CHECK(pw.orthogonality == Q(0));
  CHECK_THROWS_AS(warp_via_pairing(g, Vec<Q>(Vec<Q>::Zero(2))), PreconditionError);
}

TEST_CASE_TEMPLATE("pairing identities on random grids", S, Rational, double) {
  Rng rng(61);
  for (int t = 0; t < 200; ++t) {
    DvbShape sh{rng.uniform_int(1, 3), rng.uniform_int(1, 3), rng.uniform_int(1, 3)};
    Grid2<S> g = rand_grid2<S>(sh, rng);
    Vec<S> kappa = rand_vec<S>(sh.dimC, rng);
    PairingWarp<S> pw = warp_via_pairing(g, kappa);
    REQUIRE(near<S>(pw.viaZA, pw.ellWarp));
    REQUIRE(near<S>(pw.viaZB, pw.ellWarp));
    REQUIRE(near<S>(pw.orthogonality, S(0)));
    DualAElement<S> Phi{rand_vec<S>(sh.dimA, rng), kappa, rand_vec<S>(sh.dimB, rng)};
    DualBElement<S> Psi{rand_vec<S>(sh.dimB, rng), kappa, rand_vec<S>(sh.dimA, rng)};
    REQUIRE(near<S>(pair_duals(Phi, Psi), pair_duals_via(Phi, Psi, rand_vec<S>(sh.dimC, rng))));
    REQUIRE(near<S>(pair_C(sqcap_lift(g.xi, kappa), Psi), ell(g.xi, Psi)));
  }
}

TEST_CASE("Hamiltonian field on the line") {
  // X = x d/dx, Y = d/dx: l_[X,Y] = -pi
  VectorFieldChart<Q> X = PolyField<Q>{1, {x0()}}.as_smooth_map(), Y = PolyField<Q>{1, {cst(1)}}.as_smooth_map();
  for (int pi : {-2, 1, 6}) {
    ScalarCheck<Q> h = hamiltonian_bracket_check(X, Y, v1(3), v1(pi));
    CHECK(h.value == Q(-pi));
    CHECK(h.expected == Q(-pi));
  }
  // H_f for f(x, pi) = x pi is (x, -pi)
  VectorFieldChart<Q> H = hamiltonian_field(linear_function(X));
  Vec<Q> pt(2);
  pt << 3, 5;
  Vec<Q> expect(2);
  expect << 3, -5;
  CHECK(H.at(pt) == expect);
}

TEST_CASE("dual connection and connection pairing for p = q = 1") {
  for (int c : {-2, 0, 3}) {
    Connection<Q> conn{1, 1, PolyMap<Q>{1, {cst(c)}}.as_smooth_map()};
    CHECK(gamma_matrix(dual_connection(conn), v1(5), v1(1)) == m1(-c));
    VectorFieldChart<Q> Z = PolyField<Q>{1, {cst(1)}}.as_smooth_map();
    SmoothMap<Q> mu = PolyMap<Q>{1, {x0()}}.as_smooth_map();
    ScalarCheck<Q> cp = connection_pairing_check(conn, Z, mu, v1(5), v1(2));
    CHECK(cp.value == Q(2 * (1 + 5 * c)));
    CHECK(cp.expected == cp.value);
  }
}

TEST_CASE("covector warp on the line") {
  SmoothMap<Q> phi = PolyMap<Q>{1, {x0()}}.as_smooth_map(), mu = PolyMap<Q>{1, {cst(1)}}.as_smooth_map();
  CovectorWarpCheck<Q> mx = mx_warp_check(phi, mu, v1(4));
  CHECK(mx.warp == v1(-1));
  CHECK(mx.expected == v1(-1));
}

TEST_CASE("reversal") {
  CotangentDualElement<Q> F{v1(1), v1(2), v1(3), v1(4)};
  CotangentElement<Q> R = reversal(F);
  CHECK(R.x == v1(1));
  CHECK(R.a == v1(4));
  CHECK(R.xiX == v1(-3));
  CHECK(R.xiA == v1(2));
  TangentA<Q> Y{v1(1), v1(4), v1(7), v1(-1)}, Xc{v1(1), v1(2), v1(7), v1(5)};
  CHECK(reversal_characterization_defect(F, Y, Xc) == Q(0));
  TangentA<Q> wrong{v1(1), v1(4), v1(8), v1(-1)};
  CHECK_THROWS_AS(reversal_characterization_defect(F, wrong, Xc), PreconditionError);
}

TEST_CASE_TEMPLATE("chart identities against oracles", S, Rational, double) {
  Rng rng(67);
  for (int t = 0; t < 80; ++t) {
    const int p = rng.uniform_int(1, 2), q = rng.uniform_int(1, 2);
    PolyField<S> X = rand_poly_field<S>(p, 2, 3, rng), Y = rand_poly_field<S>(p, 2, 3, rng);
    Vec<S> m = rand_grid_point<S>(p, rng), pi = rand_grid_point<S>(p, rng);
    ScalarCheck<S> h = hamiltonian_bracket_check(X.as_smooth_map(), Y.as_smooth_map(), m, pi);
    REQUIRE(near<S>(h.value, dot(pi, oracle::bracket(X, Y, m))));

    std::vector<Polynomial<S>> gamma = rand_poly_map<S>(p, p * q * q, 1, 2, rng).comps;
    Connection<S> c{p, q, PolyMap<S>{p, gamma}.as_smooth_map()};
    oracle::Conn<S> oc{p, q, gamma};
    std::vector<Polynomial<S>> dualGamma(gamma.size(), Polynomial<S>(p));
    for (int k = 0; k < p; ++k)
      for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) dualGamma[k * q * q + i * q + j] = Polynomial<S>::constant(p, S(0)) - gamma[k * q * q + j * q + i];
    oracle::Conn<S> odc{p, q, dualGamma};
    PolyMap<S> mu = rand_poly_map<S>(p, q, 2, 2, rng), phi = rand_poly_map<S>(p, q, 2, 2, rng);
    Vec<S> phim = rand_grid_point<S>(q, rng);

    ScalarCheck<S> cp = connection_pairing_check(c, X.as_smooth_map(), mu.as_smooth_map(), m, phim);
    REQUIRE(near<S>(cp.value, dot(phim, oracle::cov(oc, X, mu, m))));

    ScalarCheck<S> dc = dual_connection_check(c, X.as_smooth_map(), phi.as_smooth_map(), mu.as_smooth_map(), m);
    Vec<S> phiAt(q), muAt(q);
    phiAt = oracle::value(phi, m);
    muAt = oracle::value(mu, m);
    REQUIRE(near<S>(dc.value, dot(oracle::cov(odc, X, phi, m), muAt)));
    REQUIRE(near<S>(dc.value, pairing_derivative(phi, mu, X.at(m), m) - dot(phiAt, oracle::cov(oc, X, mu, m))));

    CovectorWarpCheck<S> mx = mx_warp_check(phi.as_smooth_map(), mu.as_smooth_map(), m);
    for (int j = 0; j < p; ++j) {
      Vec<S> e = zeros<S>(p);
      e[j] = S(1);
      REQUIRE(near<S>(mx.warp[j], S(-pairing_derivative(phi, mu, e, m))));
    }

    CotangentDualElement<S> F{m, rand_vec<S>(q, rng), rand_vec<S>(p, rng), rand_vec<S>(q, rng)};
    Vec<S> xdot = rand_vec<S>(p, rng);
    TangentA<S> Ya{m, F.thetaKappa, xdot, rand_vec<S>(q, rng)}, Xc{m, F.kappa, xdot, rand_vec<S>(q, rng)};
    REQUIRE(near<S>(reversal_characterization_defect(F, Ya, Xc), S(0)));
  }
}
