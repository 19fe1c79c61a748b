#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "warpkit/jet.hpp"
#include "warpkit/polynomial.hpp"

using namespace warpkit;
using Q = Rational;

namespace {

template <class S>
JetScalar<S> js(int order, std::initializer_list<int> coeffs) {
  JetScalar<S> x(order, S(0));
  unsigned m = 0;
  for (int c : coeffs) x[m++] = S(c);
  return x;
}

template <class S>
JetPoint<S> rand_jet(int dim, int order, Rng& rng) {
  JetPoint<S> v = JetPoint<S>::constant(order, rand_vec<S>(dim, rng));
  for (unsigned m = 1; m < (1u << order); ++m) v.set_coeff(m, rand_vec<S>(dim, rng));
  return v;
}

// R^1 fields from a lambda on jets
template <class S, class F>
VectorFieldChart<S> field1(F f) {
  return {1, 1, [f](const JetPoint<S>& x) { return JetPoint<S>({f(x[0])}); }};
}

Vec<Q> q1(int v) {
  Vec<Q> r(1);
  r[0] = v;
  return r;
}

// smooth non-polynomial map R^2 -> R^2
SmoothMap<double> wavy() {
  return {2, 2, [](const JetPoint<double>& x) {
            return JetPoint<double>({sin(x[0]) * exp(x[1]), cos(x[0] * x[1]) + x[0] * x[0]});
          }};
}

}  // namespace

TEST_CASE("jet arithmetic") {
  JetScalar<Q> a = js<Q>(1, {3, 2});
  CHECK(a * a == js<Q>(1, {9, 12}));
  CHECK(a * JetScalar<Q>(1, Q(1)) == a);
  JetScalar<Q> b = js<Q>(2, {3, 2, 5, 7});
  // 2*3*7 + 2*2*5
  CHECK(b * b == js<Q>(2, {9, 12, 30, 62}));
  JetScalar<Q> e1 = js<Q>(2, {0, 1, 0, 0});
  CHECK(e1 * e1 == JetScalar<Q>(2, Q(0)));
  CHECK_THROWS_AS(a * b, PreconditionError);
  CHECK_THROWS_AS(JetScalar<Q>(4, Q(0)), PreconditionError);
}

TEST_CASE("tangent maps of x^2") {
  auto sq = field1<Q>([](const JetScalar<Q>& x) { return x * x; });
  JetPoint<Q> v({js<Q>(1, {3, 2})});
  CHECK(tangent_map(sq, 1, v) == JetPoint<Q>({js<Q>(1, {9, 12})}));
  JetPoint<Q> w({js<Q>(2, {3, 2, 5, 7})});
  CHECK(tangent_map(sq, 2, w)[0][3] == Q(62));
  auto id = field1<Q>([](const JetScalar<Q>& x) { return x; });
  CHECK(tangent_map(id, 2, w) == w);
  CHECK_THROWS_AS(tangent_map(sq, 1, w), PreconditionError);
}

TEST_CASE_TEMPLATE("tangent maps are functorial", S, Rational, double) {
  Rng rng(31);
  for (int t = 0; t < 60; ++t) {
    int p = rng.uniform_int(1, 3), order = rng.uniform_int(1, 3);
    PolyMap<S> f = rand_poly_map<S>(p, p, 3, 3, rng), g = rand_poly_map<S>(p, 2, 2, 3, rng);
    JetPoint<S> v = rand_jet<S>(p, order, rng);
    SmoothMap<S> gf = compose(g.as_smooth_map(), f.as_smooth_map());
    REQUIRE(tangent_map(gf, order, v) == tangent_map(g.as_smooth_map(), order, tangent_map(f.as_smooth_map(), order, v)));
  }
}

TEST_CASE("canonical involution") {
  JetPoint<Q> v({js<Q>(2, {1, 2, 3, 4})});
  CHECK(involution(1, 2, v) == JetPoint<Q>({js<Q>(2, {1, 3, 2, 4})}));
  CHECK(involution(1, 2, involution(1, 2, v)) == v);
  JetPoint<Q> w({js<Q>(3, {1, 2, 3, 4, 5, 6, 7, 8})});
  // swapping directions 1 and 3 exchanges masks 1<->4 and 3<->6
  CHECK(involution(1, 3, w) == JetPoint<Q>({js<Q>(3, {1, 5, 3, 7, 2, 6, 4, 8})}));
}

TEST_CASE_TEMPLATE("involution is natural and respects the fibre addition", S, Rational, double) {
  Rng rng(8);
  for (int t = 0; t < 80; ++t) {
    int p = rng.uniform_int(1, 3), q = rng.uniform_int(1, 3);
    PolyMap<S> f = rand_poly_map<S>(p, p, 3, 3, rng);
    JetPoint<S> v = rand_jet<S>(p, 2, rng);
    SmoothMap<S> fs = f.as_smooth_map();
    REQUIRE(fs(involution(1, 2, v)) == involution(1, 2, fs(v)));
    REQUIRE(involution(1, 2, involution(1, 2, v)) == v);
    // T^2 A over a common T^2 M point: add the A parts
    JetPoint<S> x = rand_jet<S>(p, 2, rng), a1 = rand_jet<S>(q, 2, rng), a2 = rand_jet<S>(q, 2, rng);
    auto add_fibre = [&](const JetPoint<S>& P, const JetPoint<S>& R) {
      auto [px, pa] = halves(P, p);
      auto [rx, ra] = halves(R, p);
      REQUIRE(px == rx);
      return concat(px, pa + ra);
    };
    JetPoint<S> P1 = concat(x, a1), P2 = concat(x, a2);
    REQUIRE(involution(1, 2, add_fibre(P1, P2)) == add_fibre(involution(1, 2, P1), involution(1, 2, P2)));
  }
}

TEST_CASE("tangent map derivatives match central differences") {
  SmoothMap<double> f = wavy();
  Rng rng(5);
  for (int t = 0; t < 40; ++t) {
    Vec<double> x(2), v(2), w(2);
    x << rng.uniform_int(-100, 100) / 100.0, rng.uniform_int(-100, 100) / 100.0;
    v << rng.uniform_int(-100, 100) / 50.0, rng.uniform_int(-100, 100) / 50.0;
    w << rng.uniform_int(-100, 100) / 50.0, rng.uniform_int(-100, 100) / 50.0;
    JetPoint<double> j = JetPoint<double>::constant(1, x);
    j.set_coeff(1, v);
    Vec<double> df = tangent_map(f, 1, j).coeff(1);
    Vec<double> fd = oracle::central_difference([&](const Vec<double>& y) { return f.at(y); }, x, v);
    REQUIRE(oracle::rel_close(df, fd, 1e-6));
    // mixed second derivative
    JetPoint<double> j2 = JetPoint<double>::constant(2, x);
    j2.set_coeff(1, v);
    j2.set_coeff(2, w);
    Vec<double> d2f = tangent_map(f, 2, j2).coeff(3);
    auto dv = [&](const Vec<double>& y) {
      JetPoint<double> k = JetPoint<double>::constant(1, y);
      k.set_coeff(1, v);
      return Vec<double>(f(k).coeff(1));
    };
    REQUIRE(oracle::rel_close(d2f, oracle::central_difference(dv, x, w), 1e-6));
  }
}

TEST_CASE("complete lift") {
  auto c = field1<Q>([](const JetScalar<Q>& x) { return JetScalar<Q>::constant_like(x, Q(5)); });
  JetPoint<Q> xv({JetScalar<Q>(0, Q(2)), JetScalar<Q>(0, Q(3))});
  CHECK(complete_lift(c)(xv) == JetPoint<Q>({JetScalar<Q>(0, Q(5)), JetScalar<Q>(0, Q(0))}));
  auto id = field1<Q>([](const JetScalar<Q>& x) { return x; });
  CHECK(complete_lift(id)(xv) == xv);
  auto zero = field1<Q>([](const JetScalar<Q>& x) { return JetScalar<Q>::constant_like(x, Q(0)); });
  CHECK(complete_lift(zero)(xv) == JetPoint<Q>({JetScalar<Q>(0, Q(0)), JetScalar<Q>(0, Q(0))}));
}

TEST_CASE_TEMPLATE("complete lift is (X, DX v)", S, Rational, double) {
  Rng rng(41);
  for (int t = 0; t < 80; ++t) {
    int p = rng.uniform_int(1, 3);
    PolyField<S> X = rand_poly_field<S>(p, 3, 3, rng);
    Vec<S> m = rand_grid_point<S>(p, rng), v = rand_grid_point<S>(p, rng);
    JetPoint<S> out = complete_lift(X.as_smooth_map())(concat(JetPoint<S>::constant(0, m), JetPoint<S>::constant(0, v)));
    Vec<S> Dv(p);
    for (int i = 0; i < p; ++i) {
      S s(0);
      for (int j = 0; j < p; ++j) s += oracle::d1(X, i, j, m) * v[j];
      Dv[i] = s;
    }
    auto [a, b] = halves(out, p);
    REQUIRE(vec_eq(a.coeff(0), oracle::value(X, m)));
    REQUIRE(vec_eq(b.coeff(0), Dv));
  }
}

TEST_CASE("vertical lift") {
  JetPoint<Q> at({js<Q>(1, {2, 3})});
  JetPoint<Q> z = vertical_lift(q1(0), at);
  CHECK(z == at.with_order(2));
  JetPoint<Q> l = vertical_lift(q1(1), at);
  CHECK(l == JetPoint<Q>({js<Q>(2, {2, 3, 0, 1})}));
  CHECK((vertical_lift(q1(4), at) - at.with_order(2)) + (vertical_lift(q1(5), at) - at.with_order(2)) ==
        vertical_lift(q1(9), at) - at.with_order(2));
}

TEST_CASE("bracket via warp on R^1") {
  auto X = field1<Q>([](const JetScalar<Q>& x) { return x * x; });
  auto Y = field1<Q>([](const JetScalar<Q>& x) { return x; });
  // DY X - DX Y at 2: 1*4 - 2*2*2
  CHECK(bracket_via_warp(X, Y, q1(2)) == q1(-4));
  CHECK(bracket_via_warp(X, X, q1(2)) == q1(0));
  auto c1 = field1<Q>([](const JetScalar<Q>& x) { return JetScalar<Q>::constant_like(x, Q(3)); });
  auto c2 = field1<Q>([](const JetScalar<Q>& x) { return JetScalar<Q>::constant_like(x, Q(-2)); });
  CHECK(bracket_via_warp(c1, c2, q1(7)) == q1(0));
}

TEST_CASE_TEMPLATE("bracket via warp matches the derivative oracle", S, Rational, double) {
  Rng rng(97);
  for (int t = 0; t < 100; ++t) {
    int p = rng.uniform_int(1, 3);
    PolyField<S> X = rand_poly_field<S>(p, 3, 3, rng), Y = rand_poly_field<S>(p, 3, 3, rng);
    Vec<S> m = rand_grid_point<S>(p, rng);
    Vec<S> b = bracket_via_warp(X.as_smooth_map(), Y.as_smooth_map(), m);
    Vec<S> o = oracle::bracket(X, Y, m);
    if constexpr (ScalarTraits<S>::exact)
      REQUIRE(b == o);
    else
      REQUIRE(max_abs<S>(Vec<S>(b - o)) < 1e-9);
  }
}

TEST_CASE("bracket of non-polynomial fields against finite differences") {
  SmoothMap<double> X = wavy();
  SmoothMap<double> Y{2, 2, [](const JetPoint<double>& x) {
                        return JetPoint<double>({x[1] * x[1], exp(x[0] * JetScalar<double>::constant_like(x[0], 0.5))});
                      }};
  Vec<double> m(2);
  m << 0.3, -0.7;
  Vec<double> Xm = X.at(m), Ym = Y.at(m);
  Vec<double> DYX = oracle::central_difference([&](const Vec<double>& y) { return Y.at(y); }, m, Xm);
  Vec<double> DXY = oracle::central_difference([&](const Vec<double>& y) { return X.at(y); }, m, Ym);
  CHECK(oracle::rel_close(bracket_via_warp(X, Y, m), Vec<double>(DYX - DXY), 1e-6));
}

TEST_CASE("jets and triple vector bundle elements") {
  Rng rng(2);
  JetPoint<Q> v = rand_jet<Q>(2, 3, rng);
  CHECK(tvb_to_jet(v.coeff(0), jet_to_tvb(v)) == v);
  JetPoint<Q> z = JetPoint<Q>::constant(3, rand_vec<Q>(2, rng));
  TvbElement<Q> e = jet_to_tvb(z);
  for (int s = 0; s < 7; ++s) CHECK(all_zero(e[s]));
  // (2,3)-addition is jet addition in direction 1 holding v2, v3, v23
  JetPoint<Q> w = v;
  for (unsigned m : {1u, 3u, 5u, 7u}) w.set_coeff(m, rand_vec<Q>(2, rng));
  CHECK(tvb_equal(jet_to_tvb(jet_add_over(1, v, w)), tvb_add(Axis3::A23, jet_to_tvb(v), jet_to_tvb(w))));
}

TEST_CASE_TEMPLATE("face warps of the T^3 M grid", S, Rational, double) {
  Rng rng(61);
  for (int t = 0; t < 30; ++t) {
    int p = rng.uniform_int(1, 3);
    PolyField<S> X = rand_poly_field<S>(p, 2, 3, rng), Y = rand_poly_field<S>(p, 2, 3, rng),
                 Z = rand_poly_field<S>(p, 2, 3, rng);
    T3mGrid<S> g(X.as_smooth_map(), Y.as_smooth_map(), Z.as_smooth_map());
    Vec<S> m = rand_grid_point<S>(p, rng), v = rand_grid_point<S>(p, rng);
    auto edge_point = [&](unsigned bit) {
      JetPoint<S> e = JetPoint<S>::constant(3, m);
      e.set_coeff(bit, v);
      return e;
    };
    auto tangent_of_bracket = [&](const PolyField<S>& A, const PolyField<S>& B) {
      Vec<S> r(p);
      for (int i = 0; i < p; ++i) {
        S s(0);
        for (int k = 0; k < p; ++k) s += oracle::bracket_partial(A, B, i, k, m) * v[k];
        r[i] = s;
      }
      return r;
    };
    auto close = [](const Vec<S>& a, const Vec<S>& b) {
      if constexpr (ScalarTraits<S>::exact) return a == b;
      else return max_abs<S>(Vec<S>(a - b)) < 1e-9;
    };
    CoreDvbElement<S> back = t3m_warp_back(g, edge_point(1));
    REQUIRE(close(back.w, oracle::bracket(Y, Z, m)));
    REQUIRE(close(back.u, tangent_of_bracket(Y, Z)));
    CoreDvbElement<S> left = t3m_warp_left(g, edge_point(2));
    REQUIRE(close(left.w, oracle::bracket(Z, X, m)));
    REQUIRE(close(left.u, tangent_of_bracket(Z, X)));
    CoreDvbElement<S> up = t3m_warp_up(g, edge_point(4));
    REQUIRE(close(up.w, oracle::bracket(X, Y, m)));
    REQUIRE(close(up.u, tangent_of_bracket(X, Y)));
  }
}

TEST_CASE("constant fields have vanishing warps") {
  auto c = [](int k) {
    return VectorFieldChart<Q>{2, 2, [k](const JetPoint<Q>& x) {
                                 return JetPoint<Q>({JetScalar<Q>(x.order(), Q(k)), JetScalar<Q>(x.order(), Q(-k))});
                               }};
  };
  Vec<Q> m(2);
  m << 1, 2;
  JacobiResult<Q> J = jacobi_via_ultrawarps(c(1), c(2), c(3), m);
  CHECK(all_ok(J.checks));
  CHECK(all_zero(J.u1));
  CHECK(all_zero(J.u2));
  CHECK(all_zero(J.u3));
}

TEST_CASE_TEMPLATE("Jacobi identity through ultrawarps", S, Rational, double) {
  Rng rng(71);
  for (int t = 0; t < 25; ++t) {
    PolyField<S> X = rand_poly_field<S>(3, 3, 3, rng), Y = rand_poly_field<S>(3, 3, 3, rng),
                 Z = rand_poly_field<S>(3, 3, 3, rng);
    Vec<S> m = rand_grid_point<S>(3, rng);
    JacobiResult<S> J = jacobi_via_ultrawarps(X.as_smooth_map(), Y.as_smooth_map(), Z.as_smooth_map(), m);
    REQUIRE(all_ok(J.checks));
    const double tol = ScalarTraits<S>::exact ? 0 : 1e-8;
    REQUIRE(max_abs<S>(J.residual) <= tol);
    REQUIRE(max_abs<S>(Vec<S>(J.u1 - oracle::nested_bracket(X, Y, Z, m))) <= tol);
    REQUIRE(max_abs<S>(Vec<S>(J.u2 - oracle::nested_bracket(Y, Z, X, m))) <= tol);
    REQUIRE(max_abs<S>(Vec<S>(J.u3 - oracle::nested_bracket(Z, X, Y, m))) <= tol);
  }
}

TEST_CASE("tangent of the warp") {
  Rng rng(13);
  auto pm = [&](int cod, int deg) { return rand_poly_map<double>(1, cod, deg, 3, rng); };
  for (int t = 0; t < 40; ++t) {
    PolyMap<double> X = pm(1, 2), Y = pm(2, 2), phi = pm(2, 2), psi = pm(1, 2);
    ChartGrid2<double> g{1, 1, 2, 1, X.as_smooth_map(), Y.as_smooth_map(), phi.as_smooth_map(), psi.as_smooth_map()};
    Vec<double> x(1), xd(1);
    x << rng.uniform_int(-100, 100) / 100.0;
    xd << rng.uniform_int(-100, 100) / 100.0;
    TangentWarpResult<double> r = tangent_warp_check(g, x, xd);
    REQUIRE(r.residual < 1e-9);
    // derivative slot against central differences of the warp itself
    SmoothMap<double> w{1, 1, [g](const JetPoint<double>& q) { return chart_warp(g, q); }};
    Vec<double> fd = oracle::central_difference([&](const Vec<double>& y) { return w.at(y); }, x, xd);
    REQUIRE(oracle::rel_close(Vec<double>(r.viaTw.tail(1)), fd, 1e-6));
  }
  // constant sections: the derivative slot vanishes
  auto cst = [](int cod, double c) {
    return SmoothMap<double>{1, cod, [cod, c](const JetPoint<double>& q) {
                               JetPoint<double> r;
                               for (int i = 0; i < cod; ++i) r.comps.emplace_back(q.order(), c);
                               return r;
                             }};
  };
  ChartGrid2<double> g{1, 1, 1, 1, cst(1, 2), cst(1, 3), cst(1, 5), cst(1, 7)};
  Vec<double> x(1), xd(1);
  x << 0.5;
  xd << 1.5;
  TangentWarpResult<double> r = tangent_warp_check(g, x, xd);
  CHECK(r.viaTw[0] == doctest::Approx(1.0));
  CHECK(r.viaTw[1] == 0.0);
  CHECK(r.residual == 0.0);
}
