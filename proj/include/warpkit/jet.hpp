#pragma once

#include "warpkit/scalar.hpp"
#include "warpkit/tvb.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace warpkit {

inline constexpr int kMaxJetOrder = 3;

inline unsigned dir_bit(int dir) { return 1u << (dir - 1); }

// Truncated polynomial in eps_1..eps_k with eps_i^2 = 0. Coefficient index is
// the bitmask of the eps_i it multiplies.
template <class S>
class JetScalar {
 public:
  JetScalar() : order_(0) { c_.fill(S(0)); }
  JetScalar(int order, const S& value) : order_(order) {
    if (order < 0 || order > kMaxJetOrder) throw PreconditionError("jet order must be in [0,3]");
    c_.fill(S(0));
    c_[0] = value;
  }

  static JetScalar constant_like(const JetScalar& proto, const S& value) {
    return JetScalar(proto.order_, value);
  }

  int order() const { return order_; }
  unsigned size() const { return 1u << order_; }
  const S& operator[](unsigned mask) const { return c_[mask]; }
  S& operator[](unsigned mask) { return c_[mask]; }
  const S& value() const { return c_[0]; }

  // depends on eps_dir
  bool uses(int dir) const {
    if (dir > order_) return false;
    for (unsigned m = 0; m < size(); ++m)
      if ((m & dir_bit(dir)) && !ScalarTraits<S>::is_zero(c_[m])) return true;
    return false;
  }

  JetScalar with_order(int k) const {
    if (k < order_) {
      for (unsigned m = 1u << k; m < size(); ++m)
        if (!ScalarTraits<S>::is_zero(c_[m])) throw PreconditionError("jet truncation would drop terms");
    }
    JetScalar r(k, S(0));
    for (unsigned m = 0; m < std::min(size(), r.size()); ++m) r.c_[m] = c_[m];
    return r;
  }

  JetScalar& operator+=(const JetScalar& o) {
    same_order(o);
    for (unsigned m = 0; m < size(); ++m) c_[m] += o.c_[m];
    return *this;
  }
  JetScalar& operator-=(const JetScalar& o) {
    same_order(o);
    for (unsigned m = 0; m < size(); ++m) c_[m] -= o.c_[m];
    return *this;
  }
  JetScalar& operator*=(const S& t) {
    for (unsigned m = 0; m < size(); ++m) c_[m] *= t;
    return *this;
  }
  friend JetScalar operator+(JetScalar a, const JetScalar& b) { return a += b; }
  friend JetScalar operator-(JetScalar a, const JetScalar& b) { return a -= b; }
  friend JetScalar operator-(JetScalar a) { return a *= S(-1); }
  friend JetScalar operator*(JetScalar a, const S& t) { return a *= t; }
  friend JetScalar operator*(const S& t, JetScalar a) { return a *= t; }
  friend JetScalar operator*(const JetScalar& a, const JetScalar& b) {
    a.same_order(b);
    JetScalar r(a.order_, S(0));
    const unsigned n = a.size();
    for (unsigned i = 0; i < n; ++i) {
      if (a.c_[i] == S(0)) continue;
      const unsigned rest = (n - 1) & ~i;
      // subsets j of the complement of i
      for (unsigned j = rest;; j = (j - 1) & rest) {
        r.c_[i | j] += a.c_[i] * b.c_[j];
        if (j == 0) break;
      }
    }
    return r;
  }
  JetScalar& operator*=(const JetScalar& o) { return *this = *this * o; }

  bool operator==(const JetScalar& o) const {
    if (order_ != o.order_) return false;
    for (unsigned m = 0; m < size(); ++m)
      if (!ScalarTraits<S>::eq(c_[m], o.c_[m])) return false;
    return true;
  }

 private:
  void same_order(const JetScalar& o) const {
    if (o.order_ != order_)
      throw PreconditionError("jet arithmetic: order mismatch (" + std::to_string(order_) + " vs " +
                              std::to_string(o.order_) + ")");
  }
  int order_;
  std::array<S, 8> c_;
};

template <class S>
S constant_like(const S&, const S& value) {
  return value;
}
template <class S>
JetScalar<S> constant_like(const JetScalar<S>& proto, const S& value) {
  return JetScalar<S>::constant_like(proto, value);
}

// f(a + n) = sum_j f^(j)(a) n^j / j! with n nilpotent of index <= order + 1
template <class S>
JetScalar<S> apply_unary(const JetScalar<S>& x, const std::array<S, 4>& derivs) {
  JetScalar<S> n = x;
  n[0] = S(0);
  JetScalar<S> r(x.order(), derivs[0]);
  JetScalar<S> p(x.order(), S(1));
  S fact = 1;
  for (int j = 1; j <= x.order(); ++j) {
    p = p * n;
    fact *= S(j);
    r += p * (derivs[j] / fact);
  }
  return r;
}

inline JetScalar<double> sin(const JetScalar<double>& x) {
  double a = x.value();
  return apply_unary(x, {std::sin(a), std::cos(a), -std::sin(a), -std::cos(a)});
}
inline JetScalar<double> cos(const JetScalar<double>& x) {
  double a = x.value();
  return apply_unary(x, {std::cos(a), -std::sin(a), -std::cos(a), std::sin(a)});
}
inline JetScalar<double> exp(const JetScalar<double>& x) {
  double e = std::exp(x.value());
  return apply_unary(x, {e, e, e, e});
}

// A point of T^k M in the global chart.
template <class S>
struct JetPoint {
  std::vector<JetScalar<S>> comps;

  JetPoint() = default;
  explicit JetPoint(std::vector<JetScalar<S>> c) : comps(std::move(c)) {}

  static JetPoint constant(int order, const Vec<S>& base) {
    JetPoint p;
    for (Eigen::Index i = 0; i < base.size(); ++i) p.comps.emplace_back(order, base[i]);
    return p;
  }

  std::size_t dim() const { return comps.size(); }
  int order() const { return comps.empty() ? 0 : comps[0].order(); }
  JetScalar<S>& operator[](std::size_t i) { return comps[i]; }
  const JetScalar<S>& operator[](std::size_t i) const { return comps[i]; }

  Vec<S> coeff(unsigned mask) const {
    Vec<S> v(dim());
    for (std::size_t i = 0; i < dim(); ++i) v[i] = comps[i][mask];
    return v;
  }
  void set_coeff(unsigned mask, const Vec<S>& v) {
    if (static_cast<std::size_t>(v.size()) != dim()) throw PreconditionError("set_coeff: dimension mismatch");
    for (std::size_t i = 0; i < dim(); ++i) comps[i][mask] = v[i];
  }
  bool uses(int dir) const {
    for (const auto& c : comps)
      if (c.uses(dir)) return true;
    return false;
  }
  JetPoint with_order(int k) const {
    JetPoint r;
    for (const auto& c : comps) r.comps.push_back(c.with_order(k));
    return r;
  }

  bool operator==(const JetPoint& o) const { return comps == o.comps; }
};

template <class S>
void check_jets(const JetPoint<S>& p) {
  for (const auto& c : p.comps)
    if (c.order() != p.order()) throw PreconditionError("jet point: components of different order");
}

template <class S>
JetPoint<S> operator+(const JetPoint<S>& a, const JetPoint<S>& b) {
  if (a.dim() != b.dim()) throw PreconditionError("jet point: dimension mismatch");
  JetPoint<S> r = a;
  for (std::size_t i = 0; i < a.dim(); ++i) r[i] += b[i];
  return r;
}
template <class S>
JetPoint<S> operator-(const JetPoint<S>& a, const JetPoint<S>& b) {
  if (a.dim() != b.dim()) throw PreconditionError("jet point: dimension mismatch");
  JetPoint<S> r = a;
  for (std::size_t i = 0; i < a.dim(); ++i) r[i] -= b[i];
  return r;
}

template <class S>
std::string jet_str(const JetPoint<S>& p) {
  std::string out;
  for (unsigned m = 0; m < (1u << p.order()); ++m) {
    out += m ? " " : "";
    out += "[" + std::to_string(m) + "]";
    for (std::size_t i = 0; i < p.dim(); ++i) out += (i ? "," : "") + ScalarTraits<S>::str(p[i][m]);
  }
  return out;
}

template <class S>
double jet_max_abs_diff(const JetPoint<S>& a, const JetPoint<S>& b) {
  double m = 0;
  for (unsigned k = 0; k < (1u << a.order()); ++k) m = std::max(m, max_abs<S>(a.coeff(k) - b.coeff(k)));
  return m;
}

// A smooth map of the chart, evaluable on jets of every order.
template <class S>
struct SmoothMap {
  int domDim = 0, codDim = 0;
  std::function<JetPoint<S>(const JetPoint<S>&)> eval;

  JetPoint<S> operator()(const JetPoint<S>& x) const {
    if (static_cast<int>(x.dim()) != domDim)
      throw PreconditionError("smooth map: expected " + std::to_string(domDim) + " arguments, got " +
                              std::to_string(x.dim()));
    JetPoint<S> r = eval(x);
    if (static_cast<int>(r.dim()) != codDim) throw std::logic_error("smooth map: wrong output dimension");
    return r;
  }
  Vec<S> at(const Vec<S>& x) const { return (*this)(JetPoint<S>::constant(0, x)).coeff(0); }
};

// principal part of a vector field X : M -> TM
template <class S>
using VectorFieldChart = SmoothMap<S>;

template <class S>
SmoothMap<S> compose(const SmoothMap<S>& g, const SmoothMap<S>& f) {
  if (g.domDim != f.codDim) throw PreconditionError("compose: dimension mismatch");
  return {f.domDim, g.codDim, [g, f](const JetPoint<S>& x) { return g(f(x)); }};
}

// T^k(f) on an order-k jet
template <class S>
JetPoint<S> tangent_map(const SmoothMap<S>& f, int k, const JetPoint<S>& v) {
  check_jets(v);
  if (v.order() != k) throw PreconditionError("tangent_map: jet order differs from k");
  return f(v);
}

// swap eps_i and eps_j
template <class S>
JetPoint<S> involution(int i, int j, const JetPoint<S>& v) {
  const int k = v.order();
  if (i < 1 || j < 1 || i > k || j > k) throw PreconditionError("involution: invalid direction index");
  JetPoint<S> r = v;
  for (unsigned m = 0; m < (1u << k); ++m) {
    unsigned bi = (m >> (i - 1)) & 1u, bj = (m >> (j - 1)) & 1u;
    unsigned t = m & ~(dir_bit(i) | dir_bit(j));
    if (bi) t |= dir_bit(j);
    if (bj) t |= dir_bit(i);
    for (std::size_t c = 0; c < v.dim(); ++c) r[c][t] = v[c][m];
  }
  return r;
}

// (1 + eps_d V)(P): a lift of the field V into the unused direction d.
// For P of order k this is T^k(V) with V's own direction labelled d.
template <class S>
JetPoint<S> section_lift(const VectorFieldChart<S>& V, const JetPoint<S>& P, int d) {
  check_jets(P);
  if (d < 1 || d > P.order()) throw PreconditionError("section_lift: direction outside the jet order");
  if (P.uses(d)) throw PreconditionError("section_lift: point already depends on the new direction");
  JetPoint<S> val = V(P);
  JetPoint<S> r = P;
  for (std::size_t i = 0; i < P.dim(); ++i)
    for (unsigned m = 0; m < (1u << P.order()); ++m)
      if (!(m & dir_bit(d))) r[i][m | dir_bit(d)] += val[i][m];
  return r;
}

// P = P0 + eps_d P1
template <class S>
std::pair<JetPoint<S>, JetPoint<S>> split(const JetPoint<S>& P, int d) {
  JetPoint<S> p0 = P, p1 = P;
  for (std::size_t i = 0; i < P.dim(); ++i)
    for (unsigned m = 0; m < (1u << P.order()); ++m) {
      if (m & dir_bit(d)) {
        p0[i][m] = S(0);
        p1[i][m] = S(0);
      } else {
        p1[i][m] = P[i][m | dir_bit(d)];
      }
    }
  return {p0, p1};
}

template <class S>
JetPoint<S> merge(const JetPoint<S>& p0, const JetPoint<S>& p1, int d) {
  if (p0.uses(d) || p1.uses(d)) throw PreconditionError("merge: parts depend on the merge direction");
  JetPoint<S> r = p0;
  for (std::size_t i = 0; i < p0.dim(); ++i)
    for (unsigned m = 0; m < (1u << p0.order()); ++m)
      if (!(m & dir_bit(d))) r[i][m | dir_bit(d)] = p1[i][m];
  return r;
}

template <class S>
JetPoint<S> concat(const JetPoint<S>& a, const JetPoint<S>& b) {
  JetPoint<S> r = a;
  r.comps.insert(r.comps.end(), b.comps.begin(), b.comps.end());
  return r;
}

template <class S>
std::pair<JetPoint<S>, JetPoint<S>> halves(const JetPoint<S>& x, std::size_t n) {
  JetPoint<S> a, b;
  a.comps.assign(x.comps.begin(), x.comps.begin() + n);
  b.comps.assign(x.comps.begin() + n, x.comps.end());
  return {a, b};
}

// Addition in the structure whose fibre coordinates are the coefficients
// involving eps_d (tangent vectors in direction d): others are held fixed.
template <class S>
JetPoint<S> jet_add_over(int d, const JetPoint<S>& P, const JetPoint<S>& Q, const S& sign = S(1)) {
  if (P.order() != Q.order() || P.dim() != Q.dim()) throw PreconditionError("jet_add_over: shape mismatch");
  JetPoint<S> r = P;
  for (std::size_t i = 0; i < P.dim(); ++i)
    for (unsigned m = 0; m < (1u << P.order()); ++m) {
      if (m & dir_bit(d)) {
        r[i][m] = P[i][m] + sign * Q[i][m];
      } else if (!ScalarTraits<S>::eq(P[i][m], Q[i][m])) {
        throw PreconditionError("jet_add_over: points do not lie over the same base (direction " +
                                std::to_string(d) + ")");
      }
    }
  return r;
}

template <class S>
JetPoint<S> jet_sub_over(int d, const JetPoint<S>& P, const JetPoint<S>& Q) {
  return jet_add_over(d, P, Q, S(-1));
}

namespace detail {
template <class S>
int first_free_direction(const std::vector<const JetPoint<S>*>& pts, int order, int skip = 0) {
  for (int d = 1; d <= order; ++d) {
    if (d == skip) continue;
    bool used = false;
    for (auto* p : pts) used = used || p->uses(d);
    if (!used) return d;
  }
  return 0;
}
}  // namespace detail

// X~ = J o T(X) as a vector field on the chart (x, v) of TM.
template <class S>
VectorFieldChart<S> complete_lift(const VectorFieldChart<S>& X) {
  const int p = X.domDim;
  return {2 * p, 2 * p, [X, p](const JetPoint<S>& xv) {
            auto [x, v] = halves(xv, p);
            const int k = xv.order();
            // two unused directions: f2 carries v, f1 is the new tangent direction
            int work = k;
            int f2 = detail::first_free_direction<S>({&x, &v}, work);
            int f1 = f2 ? detail::first_free_direction<S>({&x, &v}, work, f2) : 0;
            while ((!f1 || !f2) && work < kMaxJetOrder) {
              ++work;
              f2 = detail::first_free_direction<S>({&x, &v}, work);
              f1 = f2 ? detail::first_free_direction<S>({&x, &v}, work, f2) : 0;
            }
            if (!f1 || !f2) throw PreconditionError("complete_lift: no free jet directions left");
            JetPoint<S> xw = x.with_order(work), vw = v.with_order(work);
            // T(X) at the tangent vector x + eps_f2 v, then the canonical flip
            JetPoint<S> P = merge(xw, vw, f2);
            JetPoint<S> TX = section_lift(X, P, f1);
            JetPoint<S> J = involution(f1, f2, TX);
            // J reads as a tangent vector in direction f2 at the point (x, v) of TM
            auto [base, tangent] = split(J, f2);
            auto [xo, vo] = split(tangent, f1);
            (void)base;
            return concat(xo.with_order(k), vo.with_order(k));
          }};
}

// A field W on TN applied to the jet P read as a point of TN through direction
// tmDir; the new tangent goes into newDir.
template <class S>
JetPoint<S> lift_on_tm(const VectorFieldChart<S>& W, const JetPoint<S>& P, int tmDir, int newDir) {
  const std::size_t n = P.dim();
  if (static_cast<std::size_t>(W.domDim) != 2 * n) throw PreconditionError("lift_on_tm: field is not on TN");
  auto [p0, p1] = split(P, tmDir);
  JetPoint<S> q = section_lift(W, concat(p0, p1), newDir);
  auto [q0, q1] = halves(q, n);
  return merge(q0, q1, tmDir);
}

// c inserted as the pure core coefficient over the TM point `at`, new direction order+1
template <class S>
JetPoint<S> vertical_lift(const Vec<S>& c, const JetPoint<S>& at) {
  check_jets(at);
  if (static_cast<std::size_t>(c.size()) != at.dim()) throw PreconditionError("vertical_lift: dimension mismatch");
  if (at.order() != 1) throw PreconditionError("vertical_lift: expects a point of TM");
  JetPoint<S> r = at.with_order(2);
  r.set_coeff(dir_bit(1) | dir_bit(2), c);
  return r;
}

// [X,Y](m) as the core of T(Y)(X(m)) - X~(Y(m)) over Y(m).
template <class S>
Vec<S> bracket_via_warp(const VectorFieldChart<S>& X, const VectorFieldChart<S>& Y, const Vec<S>& m) {
  const int p = X.domDim;
  if (Y.domDim != p || m.size() != p) throw PreconditionError("bracket_via_warp: dimension mismatch");
  JetPoint<S> m2 = JetPoint<S>::constant(2, m);
  // X(m) as a tangent vector in the outer direction 2, then T(Y) adds Y in direction 1
  JetPoint<S> Xm = section_lift(X, m2, 2);
  JetPoint<S> TYX = section_lift(Y, Xm, 1);
  // Y(m) in direction 1, and X~ evaluated there, attached in direction 2
  JetPoint<S> Ym = section_lift(Y, JetPoint<S>::constant(1, m), 1);
  auto [y0, y1] = split(Ym, 1);
  JetPoint<S> lifted = complete_lift(X)(concat(y0, y1));
  auto [lx, lv] = halves(lifted, p);
  JetPoint<S> XtY = merge(merge(y0.with_order(2), y1.with_order(2), 1), merge(lx.with_order(2), lv.with_order(2), 1), 2);
  JetPoint<S> diff = jet_sub_over(2, TYX, XtY);
  Vec<S> c = diff.coeff(dir_bit(1) | dir_bit(2));
  // the difference is the vertical lift of c at Y(m)
  JetPoint<S> vl = vertical_lift(c, Ym);
  if (!(vl == diff)) throw IdentityFailure("bracket_via_warp: difference is not a vertical lift");
  return c;
}

// ---------------------------------------------------------------------------
// T^3 M: jet direction i is the cube direction i.

template <class S>
TvbElement<S> jet_to_tvb(const JetPoint<S>& v) {
  check_jets(v);
  if (v.order() != 3) throw PreconditionError("jet_to_tvb: expects an order-3 jet");
  TvbElement<S> e;
  const unsigned b1 = 1, b2 = 2, b3 = 4;
  e[E1] = v.coeff(b1);
  e[E2] = v.coeff(b2);
  e[E3] = v.coeff(b3);
  e[E12] = v.coeff(b1 | b2);
  e[E13] = v.coeff(b1 | b3);
  e[E23] = v.coeff(b2 | b3);
  e[E123] = v.coeff(b1 | b2 | b3);
  return e;
}

template <class S>
JetPoint<S> tvb_to_jet(const Vec<S>& base, const TvbElement<S>& e) {
  JetPoint<S> v = JetPoint<S>::constant(3, base);
  v.set_coeff(1, e[E1]);
  v.set_coeff(2, e[E2]);
  v.set_coeff(4, e[E3]);
  v.set_coeff(3, e[E12]);
  v.set_coeff(5, e[E13]);
  v.set_coeff(6, e[E23]);
  v.set_coeff(7, e[E123]);
  return v;
}

// The grid T(X~), T^2(Y), Z~~ on T^3 M. In functor order T(T(TM)) the innermost
// direction is cube 2, the middle one cube 1 and the outer one cube 3.
template <class S>
struct T3mGrid {
  VectorFieldChart<S> X, Y, Z;
  VectorFieldChart<S> Xt, Zt;  // complete lifts on TM
  VectorFieldChart<S> Ztt;     // complete lift of Zt on T(TM)

  T3mGrid(VectorFieldChart<S> x, VectorFieldChart<S> y, VectorFieldChart<S> z)
      : X(std::move(x)),
        Y(std::move(y)),
        Z(std::move(z)),
        Xt(complete_lift(X)),
        Zt(complete_lift(Z)),
        Ztt(complete_lift(Zt)) {}

  int dim() const { return X.domDim; }

  JetPoint<S> lift_on_tm(const VectorFieldChart<S>& W, const JetPoint<S>& P, int tmDir, int newDir) const {
    return warpkit::lift_on_tm(W, P, tmDir, newDir);
  }

  // edges M -> E_i
  JetPoint<S> Xm(const Vec<S>& m) const { return section_lift(X, JetPoint<S>::constant(3, m), 1); }
  JetPoint<S> Ym(const Vec<S>& m) const { return section_lift(Y, JetPoint<S>::constant(3, m), 2); }
  JetPoint<S> Zm(const Vec<S>& m) const { return section_lift(Z, JetPoint<S>::constant(3, m), 3); }

  // edge sections of the linear double sections
  JetPoint<S> Y1(const JetPoint<S>& e1) const { return section_lift(Y, e1, 2); }        // T(Y)
  JetPoint<S> Y3(const JetPoint<S>& e3) const { return section_lift(Y, e3, 2); }        // T(Y)
  JetPoint<S> X2(const JetPoint<S>& e2) const { return lift_on_tm(Xt, e2, 2, 1); }      // X~
  JetPoint<S> X3(const JetPoint<S>& e3) const { return section_lift(X, e3, 1); }        // T(X)
  JetPoint<S> Z1(const JetPoint<S>& e1) const { return lift_on_tm(Zt, e1, 1, 3); }      // Z~
  JetPoint<S> Z2(const JetPoint<S>& e2) const { return lift_on_tm(Zt, e2, 2, 3); }      // Z~

  // linear double sections
  JetPoint<S> X23(const JetPoint<S>& f) const { return lift_on_tm(Xt, f, 2, 1); }        // T(X~)
  JetPoint<S> Y13(const JetPoint<S>& f) const { return section_lift(Y, f, 2); }          // T^2(Y)
  JetPoint<S> Z12(const JetPoint<S>& f) const {                                           // Z~~
    // f as a point of T(TM): TM coordinates along direction 2, tangent along direction 1
    const std::size_t p = dim();
    auto [a0, a1] = split(f, 1);
    auto [x0, v0] = split(a0, 2);
    auto [x1, v1] = split(a1, 2);
    JetPoint<S> q = Ztt(concat(concat(x0, v0), concat(x1, v1)));
    auto [lo, hi] = halves(q, 2 * p);
    auto [A, B] = halves(lo, p);
    auto [C, D] = halves(hi, p);
    return merge(f, merge(merge(A, B, 2), merge(C, D, 2), 1), 3);
  }

  Routes<S> routes_at(const Vec<S>& m) const {
    Routes<S> r;
    r.shape = TvbShape::uniform(dim());
    JetPoint<S> x = Xm(m), y = Ym(m), z = Zm(m);
    r.ZYX = jet_to_tvb(Z12(Y1(x)));
    r.YZX = jet_to_tvb(Y13(Z1(x)));
    r.XZY = jet_to_tvb(X23(Z2(y)));
    r.ZXY = jet_to_tvb(Z12(X2(y)));
    r.YXZ = jet_to_tvb(Y13(X3(z)));
    r.XYZ = jet_to_tvb(X23(Y3(z)));
    return r;
  }
};

// Face warps at general points of the edges, as core elements.
template <class S>
CoreDvbElement<S> t3m_warp_back(const T3mGrid<S>& g, const JetPoint<S>& e1) {
  return two_face_diff(TwoFace::RD, jet_to_tvb(g.Z12(g.Y1(e1))), jet_to_tvb(g.Y13(g.Z1(e1))));
}
template <class S>
CoreDvbElement<S> t3m_warp_left(const T3mGrid<S>& g, const JetPoint<S>& e2) {
  return two_face_diff(TwoFace::FD, jet_to_tvb(g.X23(g.Z2(e2))), jet_to_tvb(g.Z12(g.X2(e2))));
}
template <class S>
CoreDvbElement<S> t3m_warp_up(const T3mGrid<S>& g, const JetPoint<S>& e3) {
  return two_face_diff(TwoFace::FR, jet_to_tvb(g.Y13(g.X3(e3))), jet_to_tvb(g.X23(g.Y3(e3))));
}

template <class S>
struct JacobiResult {
  Vec<S> u1, u2, u3, residual;
  std::vector<IdentityCheck> checks;
};

// [X,[Y,Z]], [Y,[Z,X]], [Z,[X,Y]] as the ultrawarps of the T^3 M grid
template <class S>
JacobiResult<S> jacobi_via_ultrawarps(const VectorFieldChart<S>& X, const VectorFieldChart<S>& Y,
                                      const VectorFieldChart<S>& Z, const Vec<S>& m) {
  T3mGrid<S> g(X, Y, Z);
  WarpTheoremResult<S> w = warp_theorem(g.routes_at(m));
  return {w.u.u1, w.u.u2, w.u.u3, w.residual, w.checks};
}

// ---------------------------------------------------------------------------
// Tangent of the warp for a grid on a bundle chart D = M x A x B x C.

template <class S>
struct ChartGrid2 {
  int p = 0, dA = 0, dB = 0, dC = 0;
  SmoothMap<S> X;    // M -> A
  SmoothMap<S> Y;    // M -> B
  SmoothMap<S> phi;  // M -> Hom(B, C), row-major dC x dB
  SmoothMap<S> psi;  // M -> Hom(A, C), row-major dC x dA
};

template <class S>
JetPoint<S> mat_vec(const JetPoint<S>& M, int rows, int cols, const JetPoint<S>& v) {
  JetPoint<S> r;
  for (int i = 0; i < rows; ++i) {
    JetScalar<S> acc(v.order(), S(0));
    for (int j = 0; j < cols; ++j) acc += M[i * cols + j] * v[j];
    r.comps.push_back(acc);
  }
  return r;
}

// warp section w = phi Y - psi X on jets
template <class S>
JetPoint<S> chart_warp(const ChartGrid2<S>& g, const JetPoint<S>& x) {
  return mat_vec(g.phi(x), g.dC, g.dB, g.Y(x)) - mat_vec(g.psi(x), g.dC, g.dA, g.X(x));
}

// element of TD over a TM point as a decomposed element: each fibre doubles
template <class S>
DvbElement<S> td_element(const JetPoint<S>& a, const JetPoint<S>& b, const JetPoint<S>& c) {
  auto stack = [](const JetPoint<S>& q) {
    Vec<S> v0 = q.coeff(0), v1 = q.coeff(1);
    Vec<S> r(v0.size() * 2);
    r << v0, v1;
    return r;
  };
  return {stack(a), stack(b), stack(c)};
}

template <class S>
struct TangentWarpResult {
  Vec<S> viaTangentGrid;  // (w, Dw xdot)
  Vec<S> viaTw;           // T(w)(x, xdot)
  double residual;
};

template <class S>
TangentWarpResult<S> tangent_warp_check(const ChartGrid2<S>& g, const Vec<S>& x, const Vec<S>& xdot) {
  JetPoint<S> v = JetPoint<S>::constant(1, x);
  v.set_coeff(1, xdot);
  // T(xi)(T(Y)(v)) and T(eta)(T(X)(v))
  JetPoint<S> Yv = g.Y(v), Xv = g.X(v);
  DvbElement<S> lhs = td_element(Xv, Yv, mat_vec(g.phi(v), g.dC, g.dB, Yv));
  DvbElement<S> rhs = td_element(Xv, Yv, mat_vec(g.psi(v), g.dC, g.dA, Xv));
  TangentWarpResult<S> out;
  out.viaTangentGrid = dvb_core_diff(lhs, rhs);
  SmoothMap<S> w{g.p, g.dC, [g](const JetPoint<S>& q) { return chart_warp(g, q); }};
  JetPoint<S> Tw = tangent_map(w, 1, v);
  Vec<S> t(2 * g.dC);
  t << Tw.coeff(0), Tw.coeff(1);
  out.viaTw = t;
  out.residual = max_abs<S>(out.viaTangentGrid - out.viaTw);
  return out;
}

}  // namespace warpkit
